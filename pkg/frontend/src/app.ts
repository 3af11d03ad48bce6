// Controller: wires DOM events to the service client and re-renders from
// the latest view state after every round trip.

import { ApiClient, ApiError } from "./api.js";
import {
  applyGround,
  applyLearner,
  applySession,
  applyStateFetch,
  initialState,
  learnerDialogActive,
  ViewState,
} from "./state.js";
import {
  LearnerHandlers,
  renderLearned,
  renderLearner,
  renderTrace,
  renderWorld,
} from "./render.js";

const SILENCE_TIMEOUT_MS = 20_000;

export interface ConsoleElements {
  appSelect: HTMLSelectElement;
  newSessionButton: HTMLButtonElement;
  commandInput: HTMLInputElement;
  groundButton: HTMLButtonElement;
  teachButton: HTMLButtonElement;
  worldPanel: HTMLElement;
  tracePanel: HTMLElement;
  learnerPanel: HTMLElement;
  learnedPanel: HTMLElement;
  statusLine: HTMLElement;
}

export class ConsoleApp {
  state: ViewState = initialState();
  private silenceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private client: ApiClient,
    private ui: ConsoleElements,
    private silenceMs: number = SILENCE_TIMEOUT_MS,
  ) {
    ui.newSessionButton.addEventListener("click", () => void this.newSession());
    ui.groundButton.addEventListener("click", () => void this.ground());
    ui.teachButton.addEventListener("click", () => void this.startLearner());
  }

  private setState(next: ViewState): void {
    this.state = next;
    this.redraw();
  }

  private status(text: string): void {
    this.ui.statusLine.textContent = text;
  }

  redraw(): void {
    renderWorld(this.state.snapshot, this.ui.worldPanel);
    renderTrace(this.state.trace, this.ui.tracePanel);
    renderLearner(this.state.learner, this.ui.learnerPanel, this.handlers());
    renderLearned(this.state.learnedTemplates, this.ui.learnedPanel);
    this.ui.learnerPanel.hidden = this.state.learner === null;
  }

  async newSession(): Promise<void> {
    this.clearSilenceTimer();
    try {
      const resp = await this.client.createSession(this.ui.appSelect.value);
      this.setState(applySession(this.state, resp));
      const stateResp = await this.client.getState(resp.session_id);
      this.setState(applyStateFetch(this.state, stateResp));
      this.status(`session ${resp.session_id.slice(0, 8)} (${resp.app_name})`);
    } catch (err) {
      this.fail(err);
    }
  }

  async ground(): Promise<void> {
    if (!this.state.sessionId) return;
    const command = this.ui.commandInput.value.trim();
    if (!command) return;
    try {
      const resp = await this.client.ground(this.state.sessionId, command, true);
      this.setState(applyGround(this.state, resp));
      if (resp.result.aid_sequence.length === 0) {
        this.status("could not ground that command — try teaching it");
      } else if (resp.executed === false) {
        this.status(`grounded but execution failed: ${resp.execution_error}`);
      } else {
        this.status(`fired AIDs [${resp.result.aid_sequence.join(", ")}]`);
      }
    } catch (err) {
      this.fail(err);
    }
  }

  async startLearner(): Promise<void> {
    if (!this.state.sessionId) return;
    const command = this.ui.commandInput.value.trim();
    if (!command) return;
    try {
      const resp = await this.client.learnerStart(this.state.sessionId, command);
      this.setState(applyLearner(this.state, resp));
      this.armSilenceTimer();
    } catch (err) {
      this.fail(err);
    }
  }

  private handlers(): LearnerHandlers {
    return {
      onVerify: (answer) => void this.verify(answer),
      onChoose: (index) => void this.choose(index),
      onReject: (rephrased) => void this.reject(rephrased),
      onConfirm: (confirmed) => void this.confirm(confirmed),
    };
  }

  private async verify(answer: "yes" | "no" | "silence"): Promise<void> {
    if (!this.state.sessionId) return;
    this.clearSilenceTimer();
    try {
      const resp = await this.client.learnerVerify(this.state.sessionId, answer);
      this.setState(applyLearner(this.state, resp));
    } catch (err) {
      this.fail(err);
    }
  }

  private async choose(index: number): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const resp = await this.client.learnerChoose(this.state.sessionId, index);
      this.setState(applyLearner(this.state, resp));
    } catch (err) {
      this.fail(err);
    }
  }

  private async reject(rephrased: string | null): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const resp = await this.client.learnerReject(
        this.state.sessionId, rephrased ?? undefined,
      );
      this.setState(applyLearner(this.state, resp));
    } catch (err) {
      this.fail(err);
    }
  }

  private async confirm(confirmed: boolean): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      const resp = await this.client.learnerConfirm(this.state.sessionId, confirmed);
      this.setState(applyLearner(this.state, resp));
      if (resp.session?.state === "done_learned") {
        this.status(`learned: ${resp.session.learned_template}`);
        await this.refreshState();
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async refreshState(): Promise<void> {
    if (!this.state.sessionId) return;
    const resp = await this.client.getState(this.state.sessionId);
    this.setState(applyStateFetch(this.state, resp));
  }

  // silence on the verification prompt counts as agreement
  private armSilenceTimer(): void {
    this.clearSilenceTimer();
    this.silenceTimer = setTimeout(() => {
      if (learnerDialogActive(this.state) &&
          this.state.learner?.state === "awaiting_verification") {
        void this.verify("silence");
      }
    }, this.silenceMs);
  }

  private clearSilenceTimer(): void {
    if (this.silenceTimer !== null) {
      clearTimeout(this.silenceTimer);
      this.silenceTimer = null;
    }
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError && err.status === 404) {
      // expired or unknown session: reset the dialog, keep the page usable
      this.setState({ ...initialState(), learnedTemplates: this.state.learnedTemplates });
      this.status("session expired — start a new one");
      return;
    }
    this.status(err instanceof Error ? err.message : String(err));
  }
}
