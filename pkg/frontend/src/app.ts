/**
 * Entry point: annotator identity plus navigation between the three
 * views. The annotator id is the only thing kept across reloads.
 */

import { ApiClient } from "./client.js";
import { CollectionView } from "./collect.js";
import { DashboardView } from "./dashboard.js";
import { clear, el } from "./render.js";
import { VerificationView } from "./verify.js";

const ANNOTATOR_KEY = "annotation-ui.annotator";

export function rememberedAnnotator(storage: Storage): string | null {
  const value = storage.getItem(ANNOTATOR_KEY);
  return value !== null && value.trim() !== "" ? value : null;
}

export function rememberAnnotator(storage: Storage, annotatorId: string): void {
  storage.setItem(ANNOTATOR_KEY, annotatorId.trim());
}

type ViewName = "collect" | "verify" | "dashboard";

export function mountApp(root: HTMLElement, client: ApiClient, storage: Storage): void {
  clear(root);
  const annotatorId = rememberedAnnotator(storage);
  if (annotatorId === null) {
    root.append(renderLogin(root, client, storage));
    return;
  }
  root.append(renderShell(root, client, storage, annotatorId));
}

function renderLogin(root: HTMLElement, client: ApiClient, storage: Storage): HTMLElement {
  const input = el("input", {
    class: "annotator-input",
    type: "text",
    placeholder: "e.g. ann-42",
  }) as HTMLInputElement;
  const start = () => {
    if (input.value.trim() === "") return;
    rememberAnnotator(storage, input.value);
    mountApp(root, client, storage);
  };
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") start();
  });
  return el(
    "section",
    { class: "login" },
    el("h1", {}, "Annotation"),
    el("p", {}, "Pick any annotator id; it only links your answers together."),
    el("label", { class: "annotator" }, "Annotator id", input),
    el("button", { class: "start", type: "button", onclick: start }, "Start"),
  );
}

function renderShell(
  root: HTMLElement,
  client: ApiClient,
  storage: Storage,
  annotatorId: string,
): HTMLElement {
  const body = el("main", { class: "view" });
  const views: Record<ViewName, { label: string; load: () => Promise<void> }> = {
    collect: {
      label: "Write questions",
      load: () => new CollectionView(body, client, annotatorId).load(),
    },
    verify: {
      label: "Verify answers",
      load: () => new VerificationView(body, client, annotatorId).load(),
    },
    dashboard: {
      label: "Dashboard",
      load: () => new DashboardView(body, client).load(),
    },
  };

  const nav = el(
    "nav",
    { class: "tabs" },
    ...(Object.keys(views) as ViewName[]).map((name) =>
      el(
        "button",
        {
          class: "tab",
          type: "button",
          "data-view": name,
          onclick: () => void views[name].load(),
        },
        views[name].label,
      ),
    ),
    el(
      "button",
      {
        class: "switch-annotator",
        type: "button",
        onclick: () => {
          storage.removeItem(ANNOTATOR_KEY);
          mountApp(root, client, storage);
        },
      },
      `Not ${annotatorId}?`,
    ),
  );

  void views.collect.load();
  return el("div", { class: "shell" }, nav, body);
}

// Browser bootstrap; tests drive mountApp directly.
if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  const root = document.getElementById("app");
  if (root !== null) {
    mountApp(root, new ApiClient(""), window.localStorage);
  }
}
