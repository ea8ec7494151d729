/** Browser shell: wires keyboard events, the completion client, and the
 * pure renderer together. All logic lives in state.ts/client.ts; this file
 * only moves data between the DOM and those modules. */

import { CompletionClient } from "./client.js";
import { render } from "./render.js";
import {
  applyResponse,
  initialState,
  onKeystroke,
  requestFor,
  withNotice,
} from "./state.js";
import type { EditorState } from "./types.js";

const DEFAULT_SOURCE = "我 对 你 的 帮助 表示 感谢 。";

export function mount(root: HTMLElement): void {
  const baseUrl =
    root.dataset.apiBase ?? (window as { GWLAN_API_BASE?: string }).GWLAN_API_BASE ?? "http://127.0.0.1:8080";
  let state: EditorState = initialState(root.dataset.source ?? DEFAULT_SOURCE);

  const paint = (): void => {
    root.innerHTML = render(state);
  };
  const client = new CompletionClient(
    { baseUrl },
    {
      onSuggestions: (response) => {
        state = applyResponse(state, response);
        paint();
      },
      onError: (message) => {
        state = withNotice(state, message);
        paint();
      },
    }
  );

  document.addEventListener("keydown", (event) => {
    const step = onKeystroke(state, event.key);
    if (step.state === state && step.effect === "none") return;
    event.preventDefault();
    state = step.state;
    if (step.effect === "request") client.schedule(requestFor(state));
    if (step.effect === "cancel") client.cancel();
    paint();
  });

  paint();
}

const container = document.getElementById("app");
if (container) mount(container);
