/** Small DOM construction helpers so the renderers stay readable without
 * pulling in a framework. */

export interface ElSpec {
  className?: string;
  text?: string;
  attrs?: Record<string, string>;
  onClick?: (ev: Event) => void;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  spec: ElSpec = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (spec.className) node.className = spec.className;
  if (spec.text !== undefined) node.textContent = spec.text;
  if (spec.attrs) {
    for (const [name, value] of Object.entries(spec.attrs)) {
      node.setAttribute(name, value);
    }
  }
  if (spec.onClick) node.addEventListener("click", spec.onClick);
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function button(
  label: string,
  onClick: (ev: Event) => void,
  spec: ElSpec = {},
): HTMLButtonElement {
  const node = el("button", { ...spec, text: label, onClick });
  node.type = "button";
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function money(amount: number, currency: string): string {
  return `${currency}${amount}`;
}
