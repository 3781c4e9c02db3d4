/** DOM construction and rendering; no service calls in here. */

import { ZONE_CODES, ZONE_COLORS, ZONE_NAMES } from "./keymap.js";
import { currentFrame, progressPerTrack, type UiSessionState } from "./state.js";

export interface AppElements {
  frameImage: HTMLImageElement;
  frameLabel: HTMLElement;
  legend: HTMLElement;
  roster: HTMLElement;
  progress: HTMLElement;
  status: HTMLElement;
  noteInput: HTMLTextAreaElement;
  noteSubmit: HTMLButtonElement;
}

/** Build the static skeleton inside `root` and return the live elements. */
export function mountApp(root: HTMLElement): AppElements {
  root.innerHTML = `
    <div class="annotator">
      <header>
        <span id="frame-label"></span>
        <span id="status" role="status"></span>
      </header>
      <main>
        <img id="frame-image" alt="session frame" />
        <aside>
          <ul id="legend" class="legend"></ul>
          <ul id="roster" class="roster"></ul>
          <div id="progress" class="progress"></div>
          <label for="note-input">note for current unit</label>
          <textarea id="note-input" rows="3"></textarea>
          <button id="note-submit" type="button">attach note</button>
          <p class="hint">keys: i/p/s/x label, 1-4 track, arrows step, u next unlabeled</p>
        </aside>
      </main>
    </div>`;
  const get = <T extends HTMLElement>(id: string) => root.querySelector<T>(`#${id}`)!;
  const elements: AppElements = {
    frameImage: get<HTMLImageElement>("frame-image"),
    frameLabel: get("frame-label"),
    legend: get("legend"),
    roster: get("roster"),
    progress: get("progress"),
    status: get("status"),
    noteInput: get<HTMLTextAreaElement>("note-input"),
    noteSubmit: get<HTMLButtonElement>("note-submit"),
  };
  renderLegend(elements.legend);
  return elements;
}

/** The zone legend mirrors the proximity-grid colors and letter codes. */
export function renderLegend(container: HTMLElement): void {
  container.innerHTML = "";
  for (const code of ZONE_CODES) {
    const item = document.createElement("li");
    item.dataset.zone = code;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = ZONE_COLORS[code];
    const text = document.createElement("span");
    text.textContent = `${code} = ${ZONE_NAMES[code]}`;
    item.append(swatch, text);
    container.appendChild(item);
  }
}

export function render(state: UiSessionState, elements: AppElements, frameUrl: string): void {
  elements.frameImage.src = frameUrl;
  elements.frameLabel.textContent = state.done
    ? `frame ${currentFrame(state)} — all units labeled (done)`
    : `frame ${currentFrame(state)} (${state.frameIdx + 1}/${state.frames.length})`;
  elements.status.textContent = state.status;

  elements.roster.innerHTML = "";
  state.tracks.forEach((track, k) => {
    const item = document.createElement("li");
    item.dataset.track = track;
    item.textContent = `${k + 1}: ${track}`;
    if (track === state.selectedTrack) item.classList.add("selected");
    elements.roster.appendChild(item);
  });

  const progress = progressPerTrack(state);
  elements.progress.innerHTML = "";
  for (const track of state.tracks) {
    const { labeled, total } = progress[track];
    const line = document.createElement("div");
    line.dataset.track = track;
    line.textContent = `${track}: ${labeled}/${total}`;
    elements.progress.appendChild(line);
  }
}
