/** Pure view: EditorState in, HTML string out. The shell assigns the
 * result to a container's innerHTML; no DOM reads, no hidden state. */

import { contextType } from "./state.js";
import type { EditorState } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function tokenSpans(tokens: string[], side: string): string {
  return tokens
    .map((t) => `<span class="token ${side}">${escapeHtml(t)}</span>`)
    .join(" ");
}

function suggestionRows(state: EditorState): string {
  return state.suggestions
    .map((s, i) => {
      const selected = i === state.selection ? " selected" : "";
      const width = Math.round(s.score * 100);
      return (
        `<li class="suggestion${selected}">` +
        `<span class="word">${escapeHtml(s.word)}</span>` +
        `<span class="bar" style="width:${width}%"></span>` +
        `<span class="score">${s.score.toFixed(3)}</span>` +
        `</li>`
      );
    })
    .join("");
}

export function render(state: EditorState): string {
  const parts: string[] = [];
  parts.push(
    `<div class="pane source"><h2>Source</h2><p>${escapeHtml(state.source)}</p></div>`
  );
  const caret = `<span class="caret">${escapeHtml(state.pending)}<span class="cursor">|</span></span>`;
  const leftHtml = tokenSpans(state.left, "left");
  const rightHtml = tokenSpans(state.right, "right");
  parts.push(
    `<div class="pane editor"><h2>Target <em class="mode">${contextType(state)}</em></h2>` +
      `<p>${[leftHtml, caret, rightHtml].filter(Boolean).join(" ")}</p></div>`
  );
  if (state.suggestions.length) {
    parts.push(
      `<div class="pane dropdown"><ul class="suggestions">${suggestionRows(state)}</ul></div>`
    );
  }
  if (state.notice) {
    parts.push(`<div class="notice">${escapeHtml(state.notice)}</div>`);
  }
  return parts.join("\n");
}
