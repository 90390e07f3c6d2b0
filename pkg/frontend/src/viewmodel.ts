/**
 * Client-side state for one threshold-selection session.
 *
 * The view model enforces the masking invariant on everything it stores:
 * nothing at or below the current cutoff is ever kept or exposed, so a
 * renderer working from this state cannot leak hidden values even by
 * accident.  Every decision (advance/stop) is appended to a transcript;
 * `replayTranscript` re-runs the recorded decisions against a fresh
 * session and must land on the same final cutoff.
 */

import {
  FinalizeResponse,
  MaskedHistogram,
  MaskViolationError,
  SessionApi,
  SessionCreateBody,
  SessionView,
} from "./api.js";

export type TranscriptAction = "open" | "advance" | "stop";

export interface TranscriptEntry {
  action: TranscriptAction;
  /** Cutoff in force after the action was applied. */
  tau: number;
}

export interface SessionState {
  sessionId: string;
  status: "active" | "stopped";
  n: number;
  currentTau: number;
  hiddenCount: number;
  maskedHistogram: MaskedHistogram;
  heuristicSuggestion: "continue" | "stop" | null;
  chosenTau: number | null;
  finalization: FinalizeResponse | null;
  transcript: TranscriptEntry[];
  error: string | null;
}

function checkView(view: SessionView): void {
  // Belt and braces on top of the api-layer check: a histogram count in
  // a bin that lies entirely below the cutoff would mean hidden mass
  // was described to the client.
  const { bin_edges, counts } = view.masked_histogram;
  for (let i = 0; i < counts.length; i++) {
    const upper = bin_edges[i + 1];
    if ((counts[i] ?? 0) > 0 && upper !== undefined && upper <= view.current_tau) {
      throw new MaskViolationError(
        `histogram bin ending at ${upper} <= tau ${view.current_tau} is populated`,
      );
    }
  }
}

export class SessionViewModel {
  private state: SessionState | null = null;

  constructor(private readonly api: SessionApi) {}

  getState(): SessionState {
    if (this.state === null) {
      throw new Error("no session open");
    }
    return this.state;
  }

  hasSession(): boolean {
    return this.state !== null;
  }

  private applyView(view: SessionView): void {
    checkView(view);
    const s = this.getState();
    s.status = view.status;
    s.n = view.n;
    s.currentTau = view.current_tau;
    s.hiddenCount = view.hidden_count;
    s.maskedHistogram = view.masked_histogram;
    s.heuristicSuggestion = view.heuristic_suggestion;
    s.error = null;
  }

  async open(body: SessionCreateBody): Promise<SessionState> {
    const sessionId = await this.api.createSession(body);
    this.state = {
      sessionId,
      status: "active",
      n: 0,
      currentTau: 1,
      hiddenCount: 0,
      maskedHistogram: { bin_edges: [], counts: [] },
      heuristicSuggestion: null,
      chosenTau: null,
      finalization: null,
      transcript: [],
      error: null,
    };
    const view = await this.api.getView(sessionId);
    this.applyView(view);
    this.state.transcript.push({ action: "open", tau: view.current_tau });
    return this.state;
  }

  async advance(): Promise<SessionState> {
    const s = this.getState();
    const view = await this.api.advance(s.sessionId);
    this.applyView(view);
    s.transcript.push({ action: "advance", tau: view.current_tau });
    if (view.status === "stopped") {
      s.chosenTau = view.current_tau;
    }
    return s;
  }

  async stop(): Promise<SessionState> {
    const s = this.getState();
    const out = await this.api.stop(s.sessionId);
    s.status = "stopped";
    s.chosenTau = out.chosen_tau;
    s.heuristicSuggestion = null;
    s.transcript.push({ action: "stop", tau: out.chosen_tau });
    return s;
  }

  async finalize(method: string): Promise<SessionState> {
    const s = this.getState();
    s.finalization = await this.api.finalize(s.sessionId, method);
    return s;
  }

  setError(message: string): void {
    if (this.state !== null) {
      this.state.error = message;
    }
  }
}

/**
 * Re-run a recorded transcript against a fresh session with the same
 * inputs and return the final cutoff it reaches.  Used to verify that
 * the decisions alone determine the outcome.
 */
export async function replayTranscript(
  api: SessionApi,
  body: SessionCreateBody,
  transcript: TranscriptEntry[],
): Promise<number> {
  const vm = new SessionViewModel(api);
  await vm.open(body);
  for (const entry of transcript) {
    if (entry.action === "advance") {
      await vm.advance();
    } else if (entry.action === "stop") {
      await vm.stop();
    }
  }
  const s = vm.getState();
  return s.chosenTau ?? s.currentTau;
}
