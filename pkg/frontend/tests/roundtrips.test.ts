/**
 * Contract parity against recorded service traffic.
 *
 * Every exchange in the fixture was captured from the real service
 * (scripts/record_roundtrips.py). Successful requests and responses must
 * parse against our wire schemas; payloads the server rejected for shape
 * reasons must be rejected by our request schemas too, which is what
 * lets the UI block them before they ever reach the network.
 */

import { describe, expect, it } from "vitest";
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
} from "../src/schema.js";
import { exchange, roundtrips } from "./helpers.js";

interface Route {
  match: (method: string, path: string) => boolean;
  request?: z.ZodType;
  response: z.ZodType;
}

const routes: Record<string, Route> = {
  "GET /relations": {
    match: (m, p) => m === "GET" && p === "/relations",
    response: relationListSchema,
  },
  "POST /tasks/collection": {
    match: (m, p) => m === "POST" && p === "/tasks/collection",
    request: collectionCreateSchema,
    response: createdIdsSchema,
  },
  "GET /tasks/collection": {
    match: (m, p) => m === "GET" && p === "/tasks/collection",
    response: collectionTaskListSchema,
  },
  "POST /responses/collection": {
    match: (m, p) => m === "POST" && p === "/responses/collection",
    request: collectionSubmitSchema,
    response: collectionSubmitResultSchema,
  },
  "POST /tasks/verification": {
    match: (m, p) => m === "POST" && p === "/tasks/verification",
    request: verificationCreateSchema,
    response: verificationCreateResultSchema,
  },
  "GET /tasks/verification": {
    match: (m, p) => m === "GET" && p === "/tasks/verification",
    response: verificationTaskListSchema,
  },
  "POST /responses/verification": {
    match: (m, p) => m === "POST" && p === "/responses/verification",
    request: verificationSubmitSchema,
    response: acceptedSchema,
  },
  "POST /templates/{id}/evaluate": {
    match: (m, p) => m === "POST" && /^\/templates\/.+\/evaluate$/.test(p),
    response: evaluateResultSchema,
  },
  "GET /templates": {
    match: (m, p) => m === "GET" && p === "/templates",
    response: templateListSchema,
  },
  "GET /dashboard": {
    match: (m, p) => m === "GET" && p === "/dashboard",
    response: dashboardSchema,
  },
};

function routeFor(method: string, path: string): Route {
  const hit = Object.values(routes).find((r) => r.match(method, path));
  if (hit === undefined) throw new Error(`no route matches ${method} ${path}`);
  return hit;
}

// Exchanges the server rejected purely on payload shape. Our request
// schemas must reject them as well; the views never send them.
const SHAPE_REJECTED = new Set([
  "collection_wrong_count",
  "collection_no_placeholder",
  "verification_both_given",
]);

describe("recorded round-trips", () => {
  it("covers every endpoint the client speaks", () => {
    const seen = new Set(
      roundtrips.map((r) => {
        const key = Object.entries(routes).find(([, route]) =>
          route.match(r.request.method, r.request.path),
        );
        return key?.[0];
      }),
    );
    expect(seen).toEqual(new Set(Object.keys(routes)));
  });

  for (const recorded of roundtrips) {
    const { name, request, response } = recorded;
    const route = routeFor(request.method, request.path);

    if (response.status < 400) {
      it(`${name}: response parses`, () => {
        expect(() => route.response.parse(response.body)).not.toThrow();
      });
      if (request.body !== null && route.request !== undefined) {
        it(`${name}: request parses`, () => {
          expect(() => route.request!.parse(request.body)).not.toThrow();
        });
      }
    } else {
      it(`${name}: error body carries a detail string`, () => {
        expect(() => errorBodySchema.parse(response.body)).not.toThrow();
      });
    }

    if (SHAPE_REJECTED.has(name)) {
      it(`${name}: our request schema rejects it too`, () => {
        expect(route.request, `route for ${name} must have a request schema`).toBeDefined();
        expect(route.request!.safeParse(request.body).success).toBe(false);
      });
    }
  }

  it("open collection tasks show four masked sentences each", () => {
    const tasks = collectionTaskListSchema.parse(
      exchange("open_collection_tasks").response.body,
    );
    expect(tasks.length).toBeGreaterThan(0);
    for (const task of tasks) {
      expect(task.examples).toHaveLength(4);
      for (const example of task.examples) {
        expect(example.tokens[example.placeholder_index]).toBe("{x}");
      }
    }
  });

  it("hides the relation name on the hidden-name variant", () => {
    const tasks = collectionTaskListSchema.parse(
      exchange("open_collection_tasks").response.body,
    );
    const hidden = tasks.filter((t) => !t.show_relation_name);
    expect(hidden.length).toBeGreaterThan(0);
    for (const task of hidden) expect(task.relation_name).toBeNull();
  });

  it("never exposes gold answers or instance keys to annotators", () => {
    const collection = exchange("open_collection_tasks").response.body as object[];
    for (const task of collection) {
      expect(Object.keys(task)).not.toContain("instance_keys");
    }
    const verification = exchange("open_verification_tasks").response.body as object[];
    for (const task of verification) {
      expect(Object.keys(task)).not.toContain("golds");
      // strict schema double-checks: unknown keys would fail the parse
      expect(verificationTaskListSchema.safeParse(verification).success).toBe(true);
    }
  });

  it("underlines stay inside their sentence", () => {
    const tasks = collectionTaskListSchema.parse(
      exchange("open_collection_tasks").response.body,
    );
    for (const task of tasks) {
      for (const example of task.examples) {
        for (const u of example.underlines) {
          expect(u.start).toBeLessThanOrEqual(u.end);
          expect(u.end).toBeLessThan(example.tokens.length);
        }
      }
    }
  });

  it("the recorded verdict satisfies the promotion rule", () => {
    const verdict = evaluateResultSchema.parse(exchange("evaluate_template").response.body);
    expect(verdict.status).toBe("verified");
    expect(verdict.n_correct).toBeGreaterThanOrEqual(Math.ceil(0.6 * verdict.n_trials));
    expect(verdict.mean_overlap_f1).toBeGreaterThanOrEqual(0.75);
  });
});
