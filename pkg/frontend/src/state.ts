/** Client-side session state and pure transition helpers. */

export interface UiSessionState {
  sessionId: string;
  coder: string;
  passId: number;
  frameStride: number;
  /** manifest frame indices, ascending */
  frames: number[];
  tracks: string[];
  /** position within frames[] */
  frameIdx: number;
  selectedTrack: string;
  /** keys "frame:track" known to be labeled by this slice */
  labeled: Set<string>;
  done: boolean;
  status: string;
}

export function initialState(
  sessionId: string,
  coder: string,
  passId: number,
  frameStride: number,
  frames: number[],
  tracks: string[],
): UiSessionState {
  return {
    sessionId,
    coder,
    passId,
    frameStride,
    frames,
    tracks,
    frameIdx: 0,
    selectedTrack: tracks[0],
    labeled: new Set(),
    done: false,
    status: "",
  };
}

export function unitKey(frameIndex: number, trackId: string): string {
  return `${frameIndex}:${trackId}`;
}

/** Frame steps clamp at the manifest bounds; they never wrap. */
export function clampedStep(state: UiSessionState, delta: number): number {
  const target = state.frameIdx + delta;
  return Math.min(state.frames.length - 1, Math.max(0, target));
}

export function currentFrame(state: UiSessionState): number {
  return state.frames[state.frameIdx];
}

export function progressPerTrack(state: UiSessionState): Record<string, { labeled: number; total: number }> {
  const total = state.frames.length;
  const result: Record<string, { labeled: number; total: number }> = {};
  for (const track of state.tracks) {
    let labeled = 0;
    for (const frame of state.frames) {
      if (state.labeled.has(unitKey(frame, track))) labeled += 1;
    }
    result[track] = { labeled, total };
  }
  return result;
}
