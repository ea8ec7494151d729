/** Shared shapes for the workbench: editor state and the completion API. */

export interface Suggestion {
  word: string;
  score: number;
}

export type ContextType = "zero" | "prefix" | "suffix" | "bi";

export interface EditorState {
  /** Source sentence being translated (read-only). */
  source: string;
  /** Committed target tokens left of the cursor. */
  left: string[];
  /** Committed target tokens right of the cursor. */
  right: string[];
  /** Characters typed at the cursor; never contains whitespace. */
  pending: string;
  /** Candidates from the latest completed request, best first. */
  suggestions: Suggestion[];
  /** Index of the highlighted suggestion. */
  selection: number;
  /** Inline, non-blocking message (e.g. network failure); null when clear. */
  notice: string | null;
}

/** Body for POST /api/complete; contexts are space-joined token strings. */
export interface CompletionRequest {
  source: string;
  left_context: string;
  right_context: string;
  typed: string;
  top_k: number;
}

export interface CompletionResponse {
  candidates: Suggestion[];
  latency_ms: number;
}
