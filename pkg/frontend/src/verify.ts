/**
 * Verification flow: show a generated question over a sentence and let
 * the annotator either select the answering token span or mark the
 * question unanswerable.
 *
 * Selection is click-drag across tokens (shift-click stretches,
 * ctrl-click grows by one); the SpanSelection model makes disjoint
 * selections impossible and reports why an attempt was rejected.
 */

import { ApiClient } from "./client.js";
import { describeFailure } from "./collect.js";
import { clear, el, setStatus } from "./render.js";
import type { VerificationTask } from "./schema.js";
import { SpanSelection } from "./spans.js";

export class VerificationView {
  private tasks: VerificationTask[] = [];
  private cursor = 0;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly annotatorId: string,
  ) {}

  async load(): Promise<void> {
    clear(this.root);
    try {
      this.tasks = await this.client.openVerificationTasks(this.annotatorId);
    } catch (err) {
      this.root.append(
        el("p", { class: "status", "data-kind": "error" }, describeFailure(err)),
      );
      return;
    }
    this.cursor = 0;
    this.renderCurrent();
  }

  private renderCurrent(): void {
    clear(this.root);
    const task = this.tasks[this.cursor];
    if (task === undefined) {
      this.root.append(el("p", { class: "done" }, "No open verification tasks. Thank you!"));
      return;
    }
    this.root.append(this.renderTask(task));
  }

  renderTask(task: VerificationTask): HTMLElement {
    const selection = new SpanSelection(task.sentence.tokens.length);
    const status = el("p", { class: "status", role: "status" });
    const preview = el("p", { class: "preview" });
    const tokenEls: HTMLSpanElement[] = [];

    const submit = el(
      "button",
      { class: "submit", type: "button", disabled: true },
      "Submit answer",
    ) as HTMLButtonElement;
    const noAnswer = el(
      "button",
      { class: "no-answer", type: "button" },
      "No answer in this sentence",
    ) as HTMLButtonElement;

    const repaint = () => {
      const range = selection.range();
      tokenEls.forEach((tokenEl, i) => {
        const selected = range !== null && i >= range.start && i <= range.end;
        tokenEl.classList.toggle("selected", selected);
      });
      noAnswer.classList.toggle("engaged", selection.noAnswer);
      submit.disabled = !selection.isComplete();
      if (selection.noAnswer) {
        preview.textContent = "Marked unanswerable.";
      } else if (range !== null) {
        const text = task.sentence.tokens.slice(range.start, range.end + 1).join(" ");
        preview.textContent = `Selected: "${text}"`;
      } else {
        preview.textContent = "Drag across the tokens that answer the question.";
      }
    };

    task.sentence.tokens.forEach((text, i) => {
      const tokenEl = el("span", { class: "token selectable" }, text) as HTMLSpanElement;
      tokenEl.addEventListener("mousedown", (event) => {
        event.preventDefault();
        setStatus(status, "");
        if (event.shiftKey) {
          selection.extendTo(i);
        } else if (event.ctrlKey || event.metaKey) {
          const result = selection.tryAddToken(i);
          if (!result.ok) setStatus(status, result.reason, "warn");
        } else {
          selection.beginDrag(i);
        }
        repaint();
      });
      tokenEl.addEventListener("mouseover", () => {
        selection.dragOver(i);
        repaint();
      });
      tokenEls.push(tokenEl);
    });
    // End the drag wherever the mouse goes up, including outside the tokens.
    this.root.ownerDocument.addEventListener("mouseup", () => selection.endDrag());

    noAnswer.addEventListener("click", () => {
      selection.markNoAnswer();
      setStatus(status, "");
      repaint();
    });

    submit.addEventListener("click", () => {
      void this.submit(task, selection, status);
    });

    repaint();
    return el(
      "section",
      { class: "verification-task", "data-task-id": task.id },
      el("h2", { class: "question" }, task.question),
      el("p", { class: "sentence" }, ...tokenEls),
      preview,
      el("div", { class: "controls" }, noAnswer, submit),
      status,
    );
  }

  private async submit(
    task: VerificationTask,
    selection: SpanSelection,
    status: HTMLElement,
  ): Promise<void> {
    const range = selection.range();
    if (!selection.isComplete()) return;
    try {
      await this.client.submitVerification({
        task_id: task.id,
        annotator_id: this.annotatorId,
        span: selection.noAnswer ? null : range,
        unanswerable: selection.noAnswer,
      });
      this.cursor += 1;
      this.renderCurrent();
    } catch (err) {
      setStatus(status, describeFailure(err), "error");
    }
  }
}
