/**
 * Collection flow: show masked example sentences for a relation and
 * gather exactly three question templates from the annotator.
 *
 * Validation runs on every keystroke; the submit button stays disabled
 * until the draft set passes the same rules the service enforces.
 * Duplicates of the annotator's own earlier templates only warn.
 */

import { ApiClient, ApiError } from "./client.js";
import { clear, el, setStatus } from "./render.js";
import type { CollectionTask, MaskedExample } from "./schema.js";
import { checkTemplates, PLACEHOLDER, TEMPLATES_REQUIRED } from "./templates.js";

export class CollectionView {
  private tasks: CollectionTask[] = [];
  private cursor = 0;
  private readonly submitted: string[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly annotatorId: string,
  ) {}

  async load(): Promise<void> {
    clear(this.root);
    try {
      this.tasks = await this.client.openCollectionTasks(this.annotatorId);
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
      this.root.append(el("p", { class: "done" }, "No open collection tasks. Thank you!"));
      return;
    }
    this.root.append(this.renderTask(task));
  }

  renderTask(task: CollectionTask): HTMLElement {
    const relationLabel =
      task.relation_name === null
        ? "an unnamed relationship (infer it from the sentences)"
        : `the relationship "${task.relation_name}"`;

    const inputs: HTMLInputElement[] = [];
    const problems = el("ul", { class: "problems" });
    const status = el("p", { class: "status", role: "status" });
    const submit = el(
      "button",
      { class: "submit", type: "button", disabled: true },
      "Submit templates",
    ) as HTMLButtonElement;

    const revalidate = () => {
      const drafts = inputs.map((input) => input.value);
      const check = checkTemplates(drafts, this.submitted);
      clear(problems);
      for (const error of check.errors) {
        problems.append(el("li", { class: "problem", "data-kind": "error" }, error));
      }
      for (const warning of check.warnings) {
        problems.append(el("li", { class: "problem", "data-kind": "warn" }, warning));
      }
      submit.disabled = !check.ok;
      return check;
    };

    for (let i = 0; i < TEMPLATES_REQUIRED; i++) {
      const input = el("input", {
        class: "template-input",
        type: "text",
        placeholder: `Question ${i + 1}, e.g. "Where did ${PLACEHOLDER} study?"`,
        oninput: () => revalidate(),
      }) as HTMLInputElement;
      inputs.push(input);
    }

    submit.addEventListener("click", () => {
      void this.submit(task, inputs, revalidate, status);
    });

    const intro = el(
      "p",
      { class: "instructions" },
      `Each sentence below mentions a person or thing, shown as `,
      el("span", { class: "token placeholder" }, "x"),
      `, together with ${relationLabel}. The underlined words answer it. ` +
        `Write ${TEMPLATES_REQUIRED} different questions about `,
      el("span", { class: "token placeholder" }, "x"),
      ` that the underlined words would answer. Use ${PLACEHOLDER} in place of the name.`,
    );

    return el(
      "section",
      { class: "collection-task", "data-task-id": task.id },
      el("h2", {}, task.relation_name === null ? "Mystery relationship" : task.relation_name),
      intro,
      el("div", { class: "examples" }, ...task.examples.map(renderMaskedExample)),
      el(
        "div",
        { class: "drafts" },
        ...inputs.map((input, i) =>
          el("label", { class: "draft" }, `Template ${i + 1}`, input),
        ),
      ),
      problems,
      submit,
      status,
    );
  }

  private async submit(
    task: CollectionTask,
    inputs: HTMLInputElement[],
    revalidate: () => { ok: boolean },
    status: HTMLElement,
  ): Promise<void> {
    if (!revalidate().ok) return; // belt and braces; the button is disabled
    const templates = inputs.map((input) => input.value.trim());
    try {
      const result = await this.client.submitCollection({
        task_id: task.id,
        annotator_id: this.annotatorId,
        templates,
      });
      this.submitted.push(...templates);
      setStatus(
        status,
        `Saved: ${result.stored.length} new, ${result.merged.length} merged.`,
      );
      this.cursor += 1;
      this.renderCurrent();
    } catch (err) {
      setStatus(status, describeFailure(err), "error");
    }
  }
}

export function renderMaskedExample(example: MaskedExample): HTMLElement {
  const underlined = new Set<number>();
  for (const u of example.underlines) {
    for (let i = u.start; i <= u.end; i++) underlined.add(i);
  }
  const tokens = example.tokens.map((text, i) => {
    if (text === PLACEHOLDER) {
      return el("span", { class: "token placeholder" }, "x");
    }
    const classes = underlined.has(i) ? "token answer" : "token";
    return el("span", { class: classes }, text);
  });
  return el("p", { class: "example" }, ...tokens);
}

export function describeFailure(err: unknown): string {
  if (err instanceof ApiError) {
    return `The service said no (${err.status}): ${err.message}`;
  }
  return `Could not reach the service: ${err instanceof Error ? err.message : String(err)}`;
}
