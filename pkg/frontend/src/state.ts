// View state and pure update functions. The UI never mutates world state
// locally; every change comes back from the service as a snapshot.

import type {
  GroundResponse,
  LearnerResponse,
  LearnerSessionView,
  SessionResponse,
  StateResponse,
  TraceStep,
  WorldSnapshot,
} from "./api.js";

export interface LearnedTemplate {
  aid: number;
  template: string;
}

export interface ViewState {
  sessionId: string | null;
  appName: string | null;
  snapshot: WorldSnapshot | null;
  stateVersion: number;
  trace: TraceStep[];
  aidSequence: number[];
  lastError: string | null;
  executed: boolean | null;
  learner: LearnerSessionView | null;
  learnedTemplates: LearnedTemplate[];
}

export const TERMINAL_LEARNER_STATES = new Set([
  "done_learned",
  "done_confirmed",
  "done_failed",
]);

export function initialState(): ViewState {
  return {
    sessionId: null,
    appName: null,
    snapshot: null,
    stateVersion: -1,
    trace: [],
    aidSequence: [],
    lastError: null,
    executed: null,
    learner: null,
    learnedTemplates: [],
  };
}

export function applySession(state: ViewState, resp: SessionResponse): ViewState {
  return {
    ...initialState(),
    sessionId: resp.session_id,
    appName: resp.app_name,
    stateVersion: resp.state_version,
    learnedTemplates: state.learnedTemplates,
  };
}

export function applyStateFetch(state: ViewState, resp: StateResponse): ViewState {
  if (resp.state_version < state.stateVersion) {
    return state; // never regress to an older snapshot
  }
  return { ...state, snapshot: resp.state, stateVersion: resp.state_version };
}

export function applyGround(state: ViewState, resp: GroundResponse): ViewState {
  const next: ViewState = {
    ...state,
    trace: resp.result.trace,
    aidSequence: resp.result.aid_sequence,
    executed: resp.executed ?? null,
    lastError: resp.execution_error ?? null,
    stateVersion: resp.state_version,
  };
  if (resp.state) {
    next.snapshot = resp.state;
  }
  return next;
}

export function applyLearner(state: ViewState, resp: LearnerResponse): ViewState {
  const session = resp.session;
  const next = { ...state, learner: session };
  if (
    session &&
    session.state === "done_learned" &&
    session.learned_template &&
    session.learned_aid !== null
  ) {
    next.learnedTemplates = [
      ...state.learnedTemplates,
      { aid: session.learned_aid, template: session.learned_template },
    ];
  }
  return next;
}

export function learnerDialogActive(state: ViewState): boolean {
  return state.learner !== null && !TERMINAL_LEARNER_STATES.has(state.learner.state);
}

export function traceLength(state: ViewState): number {
  return state.trace.length;
}
