// Typed client for the seedcmd grounding service.

export interface BlockEntry {
  id: number;
  color: string;
  shape: string;
  name: string | null;
  location: [number, number];
}

export interface ElementEntry {
  id: number;
  type: string;
  name: string;
  location: [number, number];
  color: string;
  text: string;
  font_size: string;
  height: number;
  width: number;
}

export interface WorldSnapshot {
  app: string;
  width?: number;
  height?: number;
  blocks?: BlockEntry[];
  canvas_width?: number;
  canvas_height?: number;
  elements?: ElementEntry[];
}

export interface TraceStep {
  event: string;
  command?: string;
  aid?: number;
  api?: string;
  score?: number;
  sub_expression?: string;
  bindings?: Record<string, unknown>;
  output?: unknown;
  reason?: string;
  dropped?: string[];
}

export interface ActionCall {
  aid: number;
  api: string;
  arguments: Record<string, unknown>;
}

export interface GroundingView {
  aid_sequence: number[];
  action_call: ActionCall | null;
  trace: TraceStep[];
}

export interface GroundResponse {
  result: GroundingView;
  executed?: boolean;
  execution_error?: string;
  state?: WorldSnapshot;
  state_version: number;
  schema_version: number;
}

export interface RankedOptionView {
  aid: number;
  api: string;
  nl_text: string;
  score: number;
  bindings: Record<string, unknown>;
}

export interface LearnerSessionView {
  session_id: string;
  original_command: string;
  current_command: string;
  state: string;
  prompt: string;
  options: RankedOptionView[];
  attempt: number;
  max_attempts: number;
  chosen_index: number | null;
  learned_template: string | null;
  learned_aid: number | null;
}

export interface SessionResponse {
  session_id: string;
  app_name: string;
  backend: string;
  state_version: number;
  schema_version: number;
}

export interface StateResponse {
  state: WorldSnapshot;
  state_version: number;
  schema_version: number;
}

export interface LearnerResponse {
  session: LearnerSessionView | null;
  schema_version: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(response.status, body.detail ?? response.statusText);
    }
    return body as T;
  }

  listSpecs(): Promise<{ specs: string[] }> {
    return this.request("/specs");
  }

  createSession(spec: string, backend = "vsm"): Promise<SessionResponse> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ spec, backend }),
    });
  }

  ground(sessionId: string, command: string, execute: boolean): Promise<GroundResponse> {
    return this.request(`/sessions/${sessionId}/ground`, {
      method: "POST",
      body: JSON.stringify({ command, execute }),
    });
  }

  getState(sessionId: string): Promise<StateResponse> {
    return this.request(`/sessions/${sessionId}/state`);
  }

  learnerStart(sessionId: string, command: string): Promise<LearnerResponse> {
    return this.request(`/sessions/${sessionId}/learner/start`, {
      method: "POST",
      body: JSON.stringify({ command }),
    });
  }

  learnerVerify(sessionId: string, answer: "yes" | "no" | "silence"): Promise<LearnerResponse> {
    return this.request(`/sessions/${sessionId}/learner/verify`, {
      method: "POST",
      body: JSON.stringify({ answer }),
    });
  }

  learnerChoose(sessionId: string, index: number): Promise<LearnerResponse> {
    return this.request(`/sessions/${sessionId}/learner/choose`, {
      method: "POST",
      body: JSON.stringify({ index }),
    });
  }

  learnerReject(sessionId: string, rephrased?: string): Promise<LearnerResponse> {
    return this.request(`/sessions/${sessionId}/learner/choose`, {
      method: "POST",
      body: JSON.stringify({ reject: true, rephrased: rephrased || null }),
    });
  }

  learnerConfirm(sessionId: string, confirmed: boolean): Promise<LearnerResponse> {
    return this.request(`/sessions/${sessionId}/learner/confirm`, {
      method: "POST",
      body: JSON.stringify({ confirmed }),
    });
  }
}
