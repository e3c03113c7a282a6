/**
 * Client-side rules for question template drafts.
 *
 * Mirrors the service: exactly three templates per submission, each with
 * the placeholder exactly once, distinct after whitespace and case
 * normalization. Duplicates of the annotator's own earlier submissions
 * are allowed through with a warning; the service merges them.
 */

export const PLACEHOLDER = "{x}";
export const TEMPLATES_REQUIRED = 3;

export function countPlaceholders(text: string): number {
  return text.split(PLACEHOLDER).length - 1;
}

/** Collapse whitespace and case, the service's duplicate key. */
export function normalizeTemplate(text: string): string {
  return text.split(/\s+/).filter(Boolean).join(" ").toLowerCase();
}

export interface TemplateCheck {
  ok: boolean;
  errors: string[];
  warnings: string[];
}

/**
 * Validate a draft set before submission.
 *
 * @param drafts - Template texts as typed, one per input.
 * @param previous - Templates this annotator already submitted (normalized
 *   duplicates of these warn but do not block).
 */
export function checkTemplates(drafts: string[], previous: string[] = []): TemplateCheck {
  const errors: string[] = [];
  const warnings: string[] = [];

  const filled = drafts.filter((d) => d.trim() !== "");
  if (filled.length !== TEMPLATES_REQUIRED) {
    errors.push(`exactly ${TEMPLATES_REQUIRED} templates required, got ${filled.length}`);
  }

  drafts.forEach((draft, i) => {
    if (draft.trim() === "") return;
    const count = countPlaceholders(draft);
    if (count === 0) {
      errors.push(`template ${i + 1} needs the ${PLACEHOLDER} placeholder`);
    } else if (count > 1) {
      errors.push(`template ${i + 1} has ${count} placeholders, only one allowed`);
    }
  });

  const normalized = filled.map(normalizeTemplate);
  if (new Set(normalized).size !== normalized.length) {
    errors.push("the templates must be distinct from each other");
  }

  const seen = new Set(previous.map(normalizeTemplate));
  filled.forEach((draft) => {
    if (seen.has(normalizeTemplate(draft))) {
      warnings.push(`you already submitted "${draft.trim()}"; the service will merge it`);
    }
  });

  return { ok: errors.length === 0, errors, warnings };
}
