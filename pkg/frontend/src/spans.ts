/**
 * Token span selection for verification tasks.
 *
 * The selection is an anchor/focus pair, so it can only ever describe one
 * contiguous token range; drag and shift-click reshape it, and an attempt
 * to add a disjoint token is rejected with a reason the view can show.
 * Marking "no answer" and holding a span are mutually exclusive.
 */

export interface TokenRange {
  start: number;
  end: number;
}

export type AddResult = { ok: true } | { ok: false; reason: string };

export class SpanSelection {
  private anchor: number | null = null;
  private focus: number | null = null;
  private dragging = false;
  noAnswer = false;

  constructor(readonly tokenCount: number) {
    if (!Number.isInteger(tokenCount) || tokenCount <= 0) {
      throw new RangeError(`token count must be a positive integer, got ${tokenCount}`);
    }
  }

  private checkIndex(index: number): void {
    if (!Number.isInteger(index) || index < 0 || index >= this.tokenCount) {
      throw new RangeError(`token index ${index} out of range [0, ${this.tokenCount})`);
    }
  }

  beginDrag(index: number): void {
    this.checkIndex(index);
    this.noAnswer = false;
    this.dragging = true;
    this.anchor = index;
    this.focus = index;
  }

  dragOver(index: number): void {
    if (!this.dragging) return;
    this.checkIndex(index);
    this.focus = index;
  }

  endDrag(): void {
    this.dragging = false;
  }

  /** Shift-click: stretch the range from the existing anchor. */
  extendTo(index: number): void {
    this.checkIndex(index);
    if (this.anchor === null) {
      this.beginDrag(index);
      this.endDrag();
      return;
    }
    this.noAnswer = false;
    this.focus = index;
  }

  /**
   * Ctrl-click: grow the range by one token. Only tokens inside or
   * immediately adjacent to the current range keep it contiguous;
   * anything else is rejected.
   */
  tryAddToken(index: number): AddResult {
    this.checkIndex(index);
    const range = this.range();
    if (range === null) {
      this.beginDrag(index);
      this.endDrag();
      return { ok: true };
    }
    if (index >= range.start && index <= range.end) {
      return { ok: true };
    }
    if (index === range.start - 1 || index === range.end + 1) {
      this.anchor = Math.min(range.start, index);
      this.focus = Math.max(range.end, index);
      return { ok: true };
    }
    return {
      ok: false,
      reason: "spans must be contiguous tokens; drag across the sentence instead",
    };
  }

  /** Inclusive token range, or null when nothing is selected. */
  range(): TokenRange | null {
    if (this.anchor === null || this.focus === null) return null;
    return {
      start: Math.min(this.anchor, this.focus),
      end: Math.max(this.anchor, this.focus),
    };
  }

  markNoAnswer(): void {
    this.noAnswer = true;
    this.anchor = null;
    this.focus = null;
    this.dragging = false;
  }

  clear(): void {
    this.noAnswer = false;
    this.anchor = null;
    this.focus = null;
    this.dragging = false;
  }

  /** True once the annotator has either a span or a no-answer mark. */
  isComplete(): boolean {
    return this.noAnswer || this.range() !== null;
  }
}
