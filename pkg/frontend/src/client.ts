/**
 * Typed HTTP client for the annotation service.
 *
 * Request bodies are parsed against the wire schemas before anything is
 * sent, so an invalid payload throws locally instead of becoming a 400.
 * Responses are parsed on arrival; schema drift surfaces as an error
 * here, not as undefined reaching the views.
 */

import type { z } from "zod";

import {
  acceptedSchema,
  collectionCreateSchema,
  collectionSubmitResultSchema,
  collectionSubmitSchema,
  collectionTaskListSchema,
  createdIdsSchema,
  dashboardSchema,
  errorBodySchema,
  evaluateResultSchema,
  relationListSchema,
  templateListSchema,
  verificationCreateResultSchema,
  verificationCreateSchema,
  verificationSubmitSchema,
  verificationTaskListSchema,
} from "./schema.js";
import type {
  CollectionSubmit,
  CollectionTask,
  Dashboard,
  EvaluateResult,
  Relation,
  TemplateRow,
  VerificationSubmit,
  VerificationTask,
} from "./schema.js";

/** Service-reported failure: status plus the detail string it sent. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(
    schema: z.ZodType<T>,
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.base + path, init);
    const payload: unknown = await response.json();
    if (!response.ok) {
      const parsed = errorBodySchema.safeParse(payload);
      const detail = parsed.success ? parsed.data.detail : JSON.stringify(payload);
      throw new ApiError(response.status, detail);
    }
    return schema.parse(payload);
  }

  async listRelations(): Promise<Relation[]> {
    return this.request(relationListSchema, "GET", "/relations");
  }

  async openCollectionTasks(annotatorId: string): Promise<CollectionTask[]> {
    const query = encodeURIComponent(annotatorId);
    return this.request(collectionTaskListSchema, "GET", `/tasks/collection?annotator=${query}`);
  }

  async createCollectionTasks(relationId: string, seed: number): Promise<string[]> {
    const body = collectionCreateSchema.parse({ relation_id: relationId, seed });
    const result = await this.request(createdIdsSchema, "POST", "/tasks/collection", body);
    return result.created;
  }

  async submitCollection(
    submit: CollectionSubmit,
  ): Promise<{ stored: string[]; merged: string[] }> {
    const body = collectionSubmitSchema.parse(submit);
    return this.request(collectionSubmitResultSchema, "POST", "/responses/collection", body);
  }

  async openVerificationTasks(annotatorId: string): Promise<VerificationTask[]> {
    const query = encodeURIComponent(annotatorId);
    return this.request(
      verificationTaskListSchema,
      "GET",
      `/tasks/verification?annotator=${query}`,
    );
  }

  async createVerificationTasks(
    templateId: string,
    seed: number,
    nTrials?: number,
  ): Promise<{ created: string[]; report: { requested: number; created: number } }> {
    const body = verificationCreateSchema.parse({
      template_id: templateId,
      seed,
      ...(nTrials === undefined ? {} : { n_trials: nTrials }),
    });
    return this.request(verificationCreateResultSchema, "POST", "/tasks/verification", body);
  }

  async submitVerification(submit: VerificationSubmit): Promise<void> {
    const body = verificationSubmitSchema.parse(submit);
    await this.request(acceptedSchema, "POST", "/responses/verification", body);
  }

  async listTemplates(relationId?: string, status?: string): Promise<TemplateRow[]> {
    const params = new URLSearchParams();
    if (relationId !== undefined) params.set("relation", relationId);
    if (status !== undefined) params.set("status", status);
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    return this.request(templateListSchema, "GET", `/templates${suffix}`);
  }

  async evaluateTemplate(templateId: string): Promise<EvaluateResult> {
    const path = `/templates/${encodeURIComponent(templateId)}/evaluate`;
    return this.request(evaluateResultSchema, "POST", path);
  }

  async dashboard(): Promise<Dashboard> {
    return this.request(dashboardSchema, "GET", "/dashboard");
  }
}
