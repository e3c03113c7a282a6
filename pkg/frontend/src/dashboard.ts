/**
 * Read-only administrator dashboard: template counts per relation by
 * status, and the overall verification pass rate. No mutating controls.
 */

import { ApiClient } from "./client.js";
import { describeFailure } from "./collect.js";
import { clear, el } from "./render.js";
import type { Dashboard, Relation } from "./schema.js";

export class DashboardView {
  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {}

  async load(): Promise<void> {
    clear(this.root);
    let dashboard: Dashboard;
    let relations: Relation[];
    try {
      [dashboard, relations] = await Promise.all([
        this.client.dashboard(),
        this.client.listRelations(),
      ]);
    } catch (err) {
      this.root.append(
        el("p", { class: "status", "data-kind": "error" }, describeFailure(err)),
      );
      return;
    }
    this.root.append(this.render(dashboard, relations));
  }

  render(dashboard: Dashboard, relations: Relation[]): HTMLElement {
    const names = new Map(relations.map((r) => [r.id, r.name]));
    const passRate =
      dashboard.decided === 0 ? "n/a" : `${(dashboard.pass_rate * 100).toFixed(1)}%`;

    const header = el(
      "tr",
      {},
      ...["relation", "candidate", "verified", "rejected"].map((h) => el("th", {}, h)),
    );
    const rows = dashboard.relations.map((row) =>
      el(
        "tr",
        { class: "relation-row", "data-relation-id": row.relation_id },
        el("td", {}, names.get(row.relation_id) ?? row.relation_id),
        el("td", { class: "count candidate" }, String(row.candidate)),
        el("td", { class: "count verified" }, String(row.verified)),
        el("td", { class: "count rejected" }, String(row.rejected)),
      ),
    );

    return el(
      "section",
      { class: "dashboard" },
      el("h2", {}, "Template review"),
      el(
        "p",
        { class: "summary" },
        `${dashboard.decided} decided, ${dashboard.verified} verified, pass rate ${passRate}.`,
      ),
      dashboard.relations.length === 0
        ? el("p", { class: "empty" }, "No templates collected yet.")
        : el("table", { class: "relations" }, header, ...rows),
    );
  }
}
