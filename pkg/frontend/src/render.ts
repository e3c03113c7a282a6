/** Tiny DOM construction helpers shared by the views. */

type Attrs = Record<string, string | boolean | ((event: Event) => void)>;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
      else node.removeAttribute(key);
    } else {
      node.setAttribute(key, value);
    }
  }
  node.append(...children);
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Replace the contents of a status line; empty text hides it. */
export function setStatus(node: HTMLElement, text: string, kind: "error" | "warn" | "info" = "info"): void {
  node.textContent = text;
  node.dataset.kind = text === "" ? "" : kind;
}
