import { ApiClient } from "./api.js";
import { ConsoleApp, ConsoleElements } from "./app.js";

function requireElement<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function bootstrap(baseUrl: string, silenceMs?: number): ConsoleApp {
  const ui: ConsoleElements = {
    appSelect: requireElement<HTMLSelectElement>("app-select"),
    newSessionButton: requireElement<HTMLButtonElement>("new-session"),
    commandInput: requireElement<HTMLInputElement>("command-input"),
    groundButton: requireElement<HTMLButtonElement>("ground-button"),
    teachButton: requireElement<HTMLButtonElement>("teach-button"),
    worldPanel: requireElement("world-panel"),
    tracePanel: requireElement("trace-panel"),
    learnerPanel: requireElement("learner-panel"),
    learnedPanel: requireElement("learned-panel"),
    statusLine: requireElement("status-line"),
  };
  return new ConsoleApp(new ApiClient(baseUrl), ui, silenceMs);
}

declare global {
  interface Window {
    seedcmdConsole?: ConsoleApp;
  }
}

if (typeof window !== "undefined" && document.getElementById("app-select")) {
  const base = (window as Window & { SEEDCMD_BASE_URL?: string }).SEEDCMD_BASE_URL
    ?? "http://127.0.0.1:8000";
  window.seedcmdConsole = bootstrap(base);
}
