/** Pure editor-state transitions.
 *
 * Every function returns a fresh state plus an effect tag telling the shell
 * what to do with the completion client:
 *
 *   "request" - (re)schedule a debounced completion request
 *   "cancel"  - drop any scheduled or in-flight request
 *   "none"    - nothing to do
 *
 * Keeping the transitions pure means the whole interactive loop is testable
 * without a DOM or a clock.
 */

import type {
  CompletionRequest,
  CompletionResponse,
  ContextType,
  EditorState,
  Suggestion,
} from "./types.js";

export type Effect = "request" | "cancel" | "none";

export interface Step {
  state: EditorState;
  effect: Effect;
}

export function initialState(source: string, committed: string[] = []): EditorState {
  return {
    source,
    left: [...committed],
    right: [],
    pending: "",
    suggestions: [],
    selection: 0,
    notice: null,
  };
}

export function contextType(state: EditorState): ContextType {
  if (state.left.length && state.right.length) return "bi";
  if (state.left.length) return "prefix";
  if (state.right.length) return "suffix";
  return "zero";
}

export function requestFor(state: EditorState, topK = 5): CompletionRequest {
  return {
    source: state.source,
    left_context: state.left.join(" "),
    right_context: state.right.join(" "),
    typed: state.pending,
    top_k: topK,
  };
}

function cleared(state: EditorState): EditorState {
  return { ...state, suggestions: [], selection: 0 };
}

/** Append one typed character. Whitespace never enters `pending`, and
 * accepting a suggestion is the only way typed characters become committed
 * context, so whitespace keys are simply ignored. */
function typeCharacter(state: EditorState, ch: string): Step {
  if (/\s/.test(ch)) return { state, effect: "none" };
  return {
    state: { ...state, pending: state.pending + ch },
    effect: "request",
  };
}

function backspace(state: EditorState): Step {
  if (!state.pending) {
    // pull the nearest committed word back into the typing buffer
    if (!state.left.length) return { state, effect: "none" };
    const left = state.left.slice(0, -1);
    const pending = state.left[state.left.length - 1];
    return { state: { ...cleared(state), left, pending }, effect: "request" };
  }
  const pending = state.pending.slice(0, -1);
  if (!pending) {
    return { state: { ...cleared(state), pending }, effect: "cancel" };
  }
  return { state: { ...state, pending }, effect: "request" };
}

function moveSelection(state: EditorState, delta: number): Step {
  if (!state.suggestions.length) return { state, effect: "none" };
  const last = state.suggestions.length - 1;
  const selection = Math.min(last, Math.max(0, state.selection + delta));
  return { state: { ...state, selection }, effect: "none" };
}

/** Move the cursor across committed tokens; legal only while nothing is
 * typed, so the pending buffer never splits. Repositioning lets a user
 * reach all four context types. */
function moveCursor(state: EditorState, delta: -1 | 1): Step {
  if (state.pending) return { state, effect: "none" };
  if (delta < 0) {
    if (!state.left.length) return { state, effect: "none" };
    return {
      state: {
        ...cleared(state),
        left: state.left.slice(0, -1),
        right: [state.left[state.left.length - 1], ...state.right],
      },
      effect: "cancel",
    };
  }
  if (!state.right.length) return { state, effect: "none" };
  return {
    state: {
      ...cleared(state),
      left: [...state.left, state.right[0]],
      right: state.right.slice(1),
    },
    effect: "cancel",
  };
}

export function acceptSuggestion(state: EditorState): Step {
  const chosen: Suggestion | undefined = state.suggestions[state.selection];
  if (!chosen) return { state, effect: "none" };
  return {
    state: {
      ...cleared(state),
      left: [...state.left, chosen.word],
      pending: "",
    },
    effect: "cancel",
  };
}

/** One keyboard event. `key` follows KeyboardEvent.key naming. */
export function onKeystroke(state: EditorState, key: string): Step {
  switch (key) {
    case "Tab":
    case "Enter":
      return acceptSuggestion(state);
    case "Escape":
      return { state: cleared(state), effect: "cancel" };
    case "Backspace":
      return backspace(state);
    case "ArrowDown":
      return moveSelection(state, +1);
    case "ArrowUp":
      return moveSelection(state, -1);
    case "ArrowLeft":
      return moveCursor(state, -1);
    case "ArrowRight":
      return moveCursor(state, +1);
    default:
      if (key.length === 1) return typeCharacter(state, key);
      return { state, effect: "none" };
  }
}

/** Install a completed response. The client already filtered stale
 * sequence numbers; this just trusts the latest-wins contract. */
export function applyResponse(state: EditorState, response: CompletionResponse): EditorState {
  return { ...state, suggestions: response.candidates, selection: 0, notice: null };
}

export function withNotice(state: EditorState, notice: string): EditorState {
  return { ...state, notice };
}
