/** Shared request/response shapes of the annotation service API. */

export interface SessionInfo {
  session_id: string;
  agent_type: string;
  group_size: number;
  frame_stride: number;
  fps: number;
  tracks: string[];
  frame_indices: number[];
}

export interface NextUnit {
  done: boolean;
  frame_index?: number;
  unlabeled_tracks?: string[];
}

export interface LabelAck {
  coder_id: string;
  pass_id: number;
  frame_index: number;
  track_id: string;
  zone: string;
  note: string;
  sequence: number;
}

/** labeled/total per track for one coder:pass slice. */
export type SliceProgress = Record<string, { labeled: number; total: number }>;

export interface LabelEvent {
  coder_id: string;
  pass_id: number;
  frame_index: number;
  track_id: string;
  zone: string;
  note?: string;
}
