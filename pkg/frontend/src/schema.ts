/**
 * Wire schemas for the annotation service API.
 *
 * These mirror the service's validators exactly: every payload the UI
 * sends is parsed against a request schema before it leaves the browser,
 * and every response is parsed on arrival. Task schemas are strict so a
 * service that starts leaking extra fields (gold answers, internal keys)
 * fails the parse instead of silently reaching the annotator.
 */

import { z } from "zod";

import { countPlaceholders, normalizeTemplate, TEMPLATES_REQUIRED } from "./templates.js";

const tokenIndex = z.number().int().nonnegative();

// Inclusive token range: start <= end, both within the sentence.
export const spanBodySchema = z
  .strictObject({ start: tokenIndex, end: tokenIndex })
  .refine((s) => s.start <= s.end, { message: "span start must not exceed end" });

export const relationSchema = z.strictObject({
  id: z.string().min(1),
  name: z.string().min(1),
  instances: z.number().int().nonnegative(),
});

export const underlineSchema = z
  .strictObject({ start: tokenIndex, end: tokenIndex, text: z.string().min(1) })
  .refine((u) => u.start <= u.end, { message: "underline start must not exceed end" });

export const maskedExampleSchema = z.strictObject({
  tokens: z.array(z.string()).min(1),
  placeholder_index: tokenIndex,
  underlines: z.array(underlineSchema).min(1),
});

// Open collection task. The service hides the relation name on half the
// tasks and never exposes its internal instance keys.
export const collectionTaskSchema = z.strictObject({
  id: z.string().min(1),
  relation_id: z.string().min(1),
  set_index: z.number().int().nonnegative(),
  show_relation_name: z.boolean(),
  relation_name: z.string().nullable(),
  examples: z.array(maskedExampleSchema).length(4),
  slots: z.number().int().positive(),
  slots_remaining: z.number().int().positive(),
});

// Open verification task: question and sentence only, no gold answers.
export const verificationTaskSchema = z.strictObject({
  id: z.string().min(1),
  template_id: z.string().min(1),
  question: z.string().min(1),
  sentence: z.strictObject({
    text: z.string().min(1),
    tokens: z.array(z.string()).min(1),
  }),
});

export const templateStatusSchema = z.enum(["candidate", "verified", "rejected"]);

export const templateRowSchema = z.strictObject({
  id: z.string().min(1),
  relation_id: z.string().min(1),
  text: z.string().min(1),
  source: z.string().min(1),
  status: templateStatusSchema,
  verification: z.strictObject({
    n_trials: z.number().int().nonnegative(),
    n_correct: z.number().int().nonnegative(),
    mean_overlap_f1: z.number().min(0).max(1),
  }),
});

export const dashboardSchema = z.strictObject({
  relations: z.array(
    z.strictObject({
      relation_id: z.string().min(1),
      candidate: z.number().int().nonnegative(),
      verified: z.number().int().nonnegative(),
      rejected: z.number().int().nonnegative(),
    }),
  ),
  decided: z.number().int().nonnegative(),
  verified: z.number().int().nonnegative(),
  pass_rate: z.number().min(0).max(1),
});

// ---------------------------------------------------------------------------
// Request bodies

export const collectionCreateSchema = z.strictObject({
  relation_id: z.string().min(1),
  seed: z.number().int(),
});

export const collectionSubmitSchema = z
  .strictObject({
    task_id: z.string().min(1),
    annotator_id: z.string().min(1),
    templates: z.array(z.string()).length(TEMPLATES_REQUIRED),
  })
  .superRefine((body, ctx) => {
    const normalized: string[] = [];
    body.templates.forEach((text, i) => {
      if (text.trim() === "") {
        ctx.addIssue({ code: "custom", message: `template ${i + 1} is empty` });
        return;
      }
      const count = countPlaceholders(text);
      if (count !== 1) {
        ctx.addIssue({
          code: "custom",
          message: `template ${i + 1} must contain {x} exactly once, found ${count}`,
        });
      }
      normalized.push(normalizeTemplate(text));
    });
    if (new Set(normalized).size !== normalized.length) {
      ctx.addIssue({ code: "custom", message: "the 3 templates must be distinct" });
    }
  });

export const verificationCreateSchema = z.strictObject({
  template_id: z.string().min(1),
  seed: z.number().int(),
  n_trials: z.number().int().positive().optional(),
});

// Exactly one of span / unanswerable, same rule the service enforces.
export const verificationSubmitSchema = z
  .strictObject({
    task_id: z.string().min(1),
    annotator_id: z.string().min(1),
    span: spanBodySchema.nullable(),
    unanswerable: z.boolean(),
  })
  .refine((body) => (body.span === null) === body.unanswerable, {
    message: "give a span or mark unanswerable, not both or neither",
  });

// ---------------------------------------------------------------------------
// Response bodies

export const createdIdsSchema = z.strictObject({
  created: z.array(z.string().min(1)),
});

export const collectionSubmitResultSchema = z.strictObject({
  stored: z.array(z.string().min(1)),
  merged: z.array(z.string().min(1)),
});

export const verificationCreateResultSchema = z.strictObject({
  created: z.array(z.string().min(1)),
  report: z.strictObject({
    requested: z.number().int().positive(),
    created: z.number().int().nonnegative(),
  }),
});

export const acceptedSchema = z.strictObject({ accepted: z.literal(true) });

export const evaluateResultSchema = z.strictObject({
  template_id: z.string().min(1),
  status: templateStatusSchema,
  n_trials: z.number().int().nonnegative(),
  n_correct: z.number().int().nonnegative(),
  mean_overlap_f1: z.number().min(0).max(1),
});

export const errorBodySchema = z.object({ detail: z.string() });

export const relationListSchema = z.array(relationSchema);
export const collectionTaskListSchema = z.array(collectionTaskSchema);
export const verificationTaskListSchema = z.array(verificationTaskSchema);
export const templateListSchema = z.array(templateRowSchema);

export type SpanBody = z.infer<typeof spanBodySchema>;
export type Relation = z.infer<typeof relationSchema>;
export type MaskedExample = z.infer<typeof maskedExampleSchema>;
export type CollectionTask = z.infer<typeof collectionTaskSchema>;
export type VerificationTask = z.infer<typeof verificationTaskSchema>;
export type TemplateRow = z.infer<typeof templateRowSchema>;
export type Dashboard = z.infer<typeof dashboardSchema>;
export type CollectionSubmit = z.infer<typeof collectionSubmitSchema>;
export type VerificationSubmit = z.infer<typeof verificationSubmitSchema>;
export type EvaluateResult = z.infer<typeof evaluateResultSchema>;
