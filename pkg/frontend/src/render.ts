// DOM renderers for the world view, the grounding trace and the learner
// dialog. Grid orientation matches the engine: origin top-left, x grows
// right, y grows down.

import type {
  BlockEntry,
  LearnerSessionView,
  TraceStep,
  WorldSnapshot,
} from "./api.js";
import type { LearnedTemplate } from "./state.js";

const SHAPE_GLYPHS: Record<string, string> = {
  triangular: "▲",
  circular: "●",
  cube: "▣",
  square: "■",
  rectangular: "▬",
};

export function renderWorld(snapshot: WorldSnapshot | null, container: HTMLElement): void {
  container.textContent = "";
  if (!snapshot) {
    container.appendChild(textDiv("world-empty", "no session"));
    return;
  }
  if (snapshot.blocks !== undefined) {
    renderBlocksGrid(snapshot, container);
  } else if (snapshot.elements !== undefined) {
    renderPageCanvas(snapshot, container);
  } else {
    container.appendChild(textDiv("world-error", "unrecognized snapshot"));
  }
}

function renderBlocksGrid(snapshot: WorldSnapshot, container: HTMLElement): void {
  const width = snapshot.width ?? 10;
  const height = snapshot.height ?? 10;
  const byCell = new Map<string, BlockEntry>();
  for (const block of snapshot.blocks ?? []) {
    byCell.set(`${block.location[0]},${block.location[1]}`, block);
  }
  const grid = document.createElement("table");
  grid.className = "blocks-grid";
  for (let y = 0; y < height; y++) {
    const row = document.createElement("tr");
    for (let x = 0; x < width; x++) {
      const cell = document.createElement("td");
      cell.dataset.x = String(x);
      cell.dataset.y = String(y);
      const block = byCell.get(`${x},${y}`);
      if (block) {
        const glyph = document.createElement("span");
        glyph.className = `block block-${block.color}`;
        glyph.style.color = block.color;
        glyph.textContent = SHAPE_GLYPHS[block.shape] ?? "■";
        glyph.title = `#${block.id} ${block.color} ${block.shape}` +
          (block.name ? ` (${block.name})` : "");
        cell.appendChild(glyph);
        if (block.name) {
          const label = document.createElement("span");
          label.className = "block-name";
          label.textContent = block.name;
          cell.appendChild(label);
        }
      }
      row.appendChild(cell);
    }
    grid.appendChild(row);
  }
  container.appendChild(grid);
}

function renderPageCanvas(snapshot: WorldSnapshot, container: HTMLElement): void {
  const canvas = document.createElement("div");
  canvas.className = "page-canvas";
  const cw = snapshot.canvas_width ?? 100;
  const ch = snapshot.canvas_height ?? 100;
  for (const element of snapshot.elements ?? []) {
    const box = document.createElement("div");
    box.className = `page-element page-${element.type}`;
    box.dataset.id = String(element.id);
    box.style.left = `${(element.location[0] / cw) * 100}%`;
    box.style.top = `${(element.location[1] / ch) * 100}%`;
    box.style.width = `${(element.width / cw) * 100}%`;
    box.style.height = `${(element.height / ch) * 100}%`;
    box.style.borderColor = element.color;
    const label = document.createElement("span");
    label.className = "element-label";
    label.textContent = element.text ? `${element.name}: ${element.text}` : element.name;
    box.appendChild(label);
    canvas.appendChild(box);
  }
  container.appendChild(canvas);
}

export function renderTrace(trace: TraceStep[], container: HTMLElement): void {
  container.textContent = "";
  const list = document.createElement("ol");
  list.className = "trace";
  for (const step of trace) {
    const item = document.createElement("li");
    item.className = `trace-step trace-${step.event}`;
    const head = document.createElement("strong");
    head.textContent = step.event;
    item.appendChild(head);
    const parts: string[] = [];
    if (step.command) parts.push(step.command);
    if (step.sub_expression) parts.push(`[${step.sub_expression}]`);
    if (step.aid !== undefined) parts.push(`AID ${step.aid}`);
    if (step.score !== undefined) parts.push(`score ${step.score.toFixed(3)}`);
    if (step.reason) parts.push(step.reason);
    item.appendChild(document.createTextNode(" " + parts.join(" — ")));
    list.appendChild(item);
  }
  container.appendChild(list);
}

export interface LearnerHandlers {
  onVerify(answer: "yes" | "no" | "silence"): void;
  onChoose(index: number): void;
  onReject(rephrased: string | null): void;
  onConfirm(confirmed: boolean): void;
}

export function renderLearner(
  view: LearnerSessionView | null,
  container: HTMLElement,
  handlers: LearnerHandlers,
): void {
  container.textContent = "";
  if (!view) {
    container.hidden = true;
    return;
  }
  container.hidden = false;
  container.appendChild(textDiv("learner-prompt", view.prompt));

  if (view.state === "awaiting_verification") {
    container.appendChild(button("Yes", "verify-yes", () => handlers.onVerify("yes")));
    container.appendChild(button("No", "verify-no", () => handlers.onVerify("no")));
  } else if (view.state === "awaiting_choice") {
    const list = document.createElement("ol");
    list.className = "option-list";
    view.options.forEach((option, index) => {
      const item = document.createElement("li");
      item.appendChild(
        button(
          `${option.api} (AID ${option.aid}): ${option.nl_text}`,
          `choose-${index}`,
          () => handlers.onChoose(index),
        ),
      );
      const score = document.createElement("span");
      score.className = "option-score";
      score.textContent = ` ${option.score.toFixed(3)}`;
      item.appendChild(score);
      list.appendChild(item);
    });
    container.appendChild(list);

    const rephrase = document.createElement("input");
    rephrase.type = "text";
    rephrase.id = "rephrase-box";
    rephrase.placeholder = "rephrase the command...";
    container.appendChild(rephrase);
    container.appendChild(
      button("None of these", "reject", () =>
        handlers.onReject(rephrase.value.trim() || null),
      ),
    );
    container.appendChild(
      textDiv("attempt-counter", `attempt ${view.attempt} of ${view.max_attempts}`),
    );
  } else if (view.state === "awaiting_arg_confirm") {
    container.appendChild(button("Values are correct", "confirm-yes", () => handlers.onConfirm(true)));
    container.appendChild(button("Wrong values", "confirm-no", () => handlers.onConfirm(false)));
  } else {
    container.appendChild(textDiv(`learner-final learner-${view.state}`, view.state));
  }
}

export function renderLearned(templates: LearnedTemplate[], container: HTMLElement): void {
  container.textContent = "";
  const list = document.createElement("ul");
  list.className = "learned-list";
  for (const entry of templates) {
    const item = document.createElement("li");
    item.textContent = `AID ${entry.aid}: ${entry.template}`;
    list.appendChild(item);
  }
  container.appendChild(list);
}

function textDiv(className: string, text: string): HTMLDivElement {
  const div = document.createElement("div");
  div.className = className;
  div.textContent = text;
  return div;
}

function button(label: string, id: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.id = id;
  b.textContent = label;
  b.addEventListener("click", onClick);
  return b;
}
