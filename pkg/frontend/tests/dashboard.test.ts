import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/client.js";
import { DashboardView } from "../src/dashboard.js";
import { dashboardSchema, relationListSchema } from "../src/schema.js";
import { exchange, stubFetch } from "./helpers.js";

const DASHBOARD = dashboardSchema.parse(exchange("dashboard").response.body);
const RELATIONS = relationListSchema.parse(exchange("list_relations").response.body);

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.append(root);
});

afterEach(() => {
  root.remove();
  vi.unstubAllGlobals();
});

describe("DashboardView", () => {
  it("renders the recorded summary and per-relation counts", async () => {
    stubFetch(
      { status: 200, body: DASHBOARD },
      { status: 200, body: RELATIONS },
    );
    await new DashboardView(root, new ApiClient()).load();

    const summary = root.querySelector(".summary")?.textContent ?? "";
    expect(summary).toContain(`${DASHBOARD.decided} decided`);
    expect(summary).toContain(`${DASHBOARD.verified} verified`);
    expect(summary).toContain(`${(DASHBOARD.pass_rate * 100).toFixed(1)}%`);

    const row = DASHBOARD.relations[0]!;
    const cells = root.querySelectorAll(
      `tr[data-relation-id="${row.relation_id}"] td`,
    );
    const name = RELATIONS.find((r) => r.id === row.relation_id)?.name;
    expect(cells[0]?.textContent).toBe(name);
    expect(cells[1]?.textContent).toBe(String(row.candidate));
    expect(cells[2]?.textContent).toBe(String(row.verified));
    expect(cells[3]?.textContent).toBe(String(row.rejected));
  });

  it("is read-only: no inputs, no buttons, no forms", async () => {
    stubFetch(
      { status: 200, body: DASHBOARD },
      { status: 200, body: RELATIONS },
    );
    await new DashboardView(root, new ApiClient()).load();
    expect(root.querySelectorAll("input, button, form, select, textarea")).toHaveLength(0);
  });

  it("handles the empty state without a table", async () => {
    stubFetch(
      { status: 200, body: { relations: [], decided: 0, verified: 0, pass_rate: 0.0 } },
      { status: 200, body: [] },
    );
    await new DashboardView(root, new ApiClient()).load();
    expect(root.textContent).toContain("No templates collected yet");
    expect(root.textContent).toContain("pass rate n/a");
    expect(root.querySelector("table")).toBeNull();
  });

  it("reports a fetch failure", async () => {
    // the view fetches dashboard and relations in parallel; fail both
    stubFetch(
      { status: 500, body: { detail: "database gone" } },
      { status: 500, body: { detail: "database gone" } },
    );
    await new DashboardView(root, new ApiClient()).load();
    expect(root.textContent).toContain("database gone");
  });
});
