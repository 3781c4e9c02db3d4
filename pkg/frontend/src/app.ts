/** Controller: keyboard-driven labeling against the annotation service.
 *
 * Every keystroke becomes an action on a single FIFO queue, so at most
 * one label request is in flight and overwrites reach the service in
 * press order.  No label is ever posted without an explicit keystroke.
 */

import { ApiClient, ApiError } from "./api.js";
import { TRACK_KEYS, isZoneKey } from "./keymap.js";
import {
  clampedStep,
  currentFrame,
  initialState,
  unitKey,
  type UiSessionState,
} from "./state.js";
import { mountApp, render, type AppElements } from "./view.js";

export class AnnotationApp {
  state!: UiSessionState;
  private elements: AppElements;
  private queue: Promise<void> = Promise.resolve();

  constructor(
    private api: ApiClient,
    root: HTMLElement,
  ) {
    this.elements = mountApp(root);
    this.elements.noteSubmit.addEventListener("click", () => this.submitNote());
    document.addEventListener("keydown", (event) => this.onKeyDown(event));
  }

  async load(sessionId: string, coder: string, passId: number): Promise<void> {
    const info = await this.api.sessionInfo(sessionId);
    this.state = initialState(
      sessionId, coder, passId, info.frame_stride, info.frame_indices, info.tracks,
    );
    const slices = await this.api.progress(sessionId, coder, passId);
    const progress = slices[`${coder}:${passId}`] ?? {};
    // a fresh client may resume a half-labeled pass; trust the service counts
    for (const [track, p] of Object.entries(progress)) {
      if (p.labeled === 0) continue;
      this.state.status = `resuming: ${track} has ${p.labeled} labels`;
    }
    await this.jumpToUnlabeled();
    this.render();
  }

  /** Await until every queued action has been applied. */
  flush(): Promise<void> {
    return this.queue;
  }

  private enqueue(action: () => Promise<void>): void {
    this.queue = this.queue.then(action).catch((error: unknown) => {
      this.state.status =
        error instanceof ApiError ? `${error.errorCode}: ${error.message}` : String(error);
      this.render();
    });
  }

  private onKeyDown(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "TEXTAREA" || target.tagName === "INPUT")) {
      return; // typing a note must never label
    }
    const key = event.key;
    if (isZoneKey(key)) {
      event.preventDefault();
      this.enqueue(() => this.labelByKey(key));
    } else if (key === "ArrowRight") {
      event.preventDefault();
      this.enqueue(async () => this.navigate(+1));
    } else if (key === "ArrowLeft") {
      event.preventDefault();
      this.enqueue(async () => this.navigate(-1));
    } else if ((TRACK_KEYS as readonly string[]).includes(key)) {
      event.preventDefault();
      this.enqueue(async () => this.selectTrack(Number(key) - 1));
    } else if (key === "u") {
      event.preventDefault();
      this.enqueue(() => this.jumpToUnlabeled());
    } else if (key.length === 1) {
      this.state.status = `unmapped key "${key}" (use i/p/s/x, 1-4, arrows, u)`;
      this.render();
    }
  }

  /** Post a label for the current (frame, track), then advance. */
  private async labelByKey(zone: string): Promise<void> {
    const frameIndex = currentFrame(this.state);
    const trackId = this.state.selectedTrack;
    const ack = await this.api.postLabel(this.state.sessionId, {
      coder_id: this.state.coder,
      pass_id: this.state.passId,
      frame_index: frameIndex,
      track_id: trackId,
      zone,
    });
    this.state.labeled.add(unitKey(frameIndex, trackId));
    this.state.status = `labeled frame ${frameIndex} ${trackId} = ${ack.zone}`;
    await this.jumpToUnlabeled();
    this.render();
  }

  private navigate(delta: number): void {
    this.state.frameIdx = clampedStep(this.state, delta);
    this.state.status = "";
    this.render();
  }

  private selectTrack(index: number): void {
    if (index < this.state.tracks.length) {
      this.state.selectedTrack = this.state.tracks[index];
      this.render();
    } else {
      this.state.status = `no track ${index + 1} in this session`;
      this.render();
    }
  }

  private async jumpToUnlabeled(): Promise<void> {
    const next = await this.api.nextUnit(this.state.sessionId, this.state.coder, this.state.passId);
    if (next.done) {
      this.state.done = true;
      this.render();
      return;
    }
    this.state.done = false;
    const idx = this.state.frames.indexOf(next.frame_index!);
    if (idx >= 0) this.state.frameIdx = idx;
    const unlabeled = next.unlabeled_tracks ?? [];
    if (unlabeled.length > 0) this.state.selectedTrack = unlabeled[0];
    this.render();
  }

  private submitNote(): void {
    const text = this.elements.noteInput.value;
    if (!text) return;
    this.enqueue(async () => {
      const frameIndex = currentFrame(this.state);
      const ack = await this.api.postNote(this.state.sessionId, {
        coder_id: this.state.coder,
        pass_id: this.state.passId,
        frame_index: frameIndex,
        track_id: this.state.selectedTrack,
        note: text,
      });
      this.state.status = `note attached to frame ${ack.frame_index} ${ack.track_id}`;
      this.elements.noteInput.value = "";
      this.render();
    });
  }

  private render(): void {
    render(
      this.state,
      this.elements,
      this.api.frameUrl(this.state.sessionId, currentFrame(this.state)),
    );
  }
}
