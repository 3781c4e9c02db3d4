import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationApp } from "../src/app.js";
import { ApiClient } from "../src/api.js";
import { clampedStep, initialState } from "../src/state.js";
import { MockService } from "./mock_service.js";

function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

async function makeApp(frames: number[], tracks: string[]): Promise<{ app: AnnotationApp; mock: MockService }> {
  const mock = new MockService({
    session_id: "nav",
    frame_stride: 4,
    frames,
    tracks,
  });
  document.body.innerHTML = "<div id='app'></div>";
  const api = new ApiClient("", mock.fetch);
  const app = new AnnotationApp(api, document.getElementById("app")!);
  await app.load("nav", "c1", 1);
  return { app, mock };
}

describe("clampedStep", () => {
  const state = initialState("s", "c1", 1, 4, [0, 4, 8, 12], ["t1"]);

  it("steps by one frame within bounds", () => {
    state.frameIdx = 1;
    expect(clampedStep(state, +1)).toBe(2);
    expect(clampedStep(state, -1)).toBe(0);
  });

  it("clamps at the first and last frame, never wraps", () => {
    state.frameIdx = 0;
    expect(clampedStep(state, -1)).toBe(0);
    state.frameIdx = 3;
    expect(clampedStep(state, +1)).toBe(3);
  });
});

describe("keyboard navigation", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("arrow right moves one stride step; left clamps at the start", async () => {
    const { app } = await makeApp([0, 4, 8], ["t1"]);
    press("ArrowLeft");
    await app.flush();
    expect(app.state.frameIdx).toBe(0); // clamped
    press("ArrowRight");
    await app.flush();
    expect(app.state.frames[app.state.frameIdx]).toBe(4); // 0 + 1 step of stride 4
    press("ArrowRight");
    press("ArrowRight");
    await app.flush();
    expect(app.state.frames[app.state.frameIdx]).toBe(8); // clamped at the end
  });

  it("digit keys select tracks from the roster", async () => {
    const { app } = await makeApp([0], ["t1", "t2"]);
    press("2");
    await app.flush();
    expect(app.state.selectedTrack).toBe("t2");
    press("4"); // no fourth track in this session
    await app.flush();
    expect(app.state.selectedTrack).toBe("t2");
    expect(app.state.status).toContain("no track 4");
  });

  it("unmapped keys produce a hint and no request", async () => {
    const { app, mock } = await makeApp([0], ["t1"]);
    press("q");
    await app.flush();
    expect(app.state.status).toContain('unmapped key "q"');
    expect(mock.labelPosts).toBe(0);
  });

  it("labeling advances to the next unlabeled unit", async () => {
    const { app, mock } = await makeApp([0, 4], ["t1", "t2"]);
    expect(app.state.frames[app.state.frameIdx]).toBe(0);
    expect(app.state.selectedTrack).toBe("t1");
    press("p");
    await app.flush();
    expect(mock.labelPosts).toBe(1);
    // same frame still has t2 unlabeled
    expect(app.state.frames[app.state.frameIdx]).toBe(0);
    expect(app.state.selectedTrack).toBe("t2");
    press("i");
    await app.flush();
    expect(app.state.frames[app.state.frameIdx]).toBe(4);
    expect(app.state.selectedTrack).toBe("t1");
  });

  it("jump-to-unlabeled reports done when everything is labeled", async () => {
    const { app } = await makeApp([0], ["t1"]);
    press("s");
    await app.flush();
    expect(app.state.done).toBe(true);
    press("u");
    await app.flush();
    expect(app.state.done).toBe(true);
    expect(document.getElementById("frame-label")!.textContent).toContain("done");
  });

  it("relabeling an already-labeled unit overwrites and updates progress", async () => {
    const { app, mock } = await makeApp([0, 4], ["t1"]);
    press("p");
    await app.flush();
    // navigate back and correct the label
    press("ArrowLeft");
    press("1");
    press("x");
    await app.flush();
    expect(mock.labelPosts).toBe(2);
    expect(mock.exportCsv("c1", 1)).toContain("c1,1,0,t1,x,");
    const progress = document.querySelector<HTMLElement>("#progress [data-track='t1']")!;
    expect(progress.textContent).toBe("t1: 1/2"); // still one distinct unit labeled
  });

  it("zone keys typed into the notes box never label", async () => {
    const { app, mock } = await makeApp([0], ["t1"]);
    const textarea = document.getElementById("note-input") as HTMLTextAreaElement;
    textarea.focus();
    textarea.dispatchEvent(new KeyboardEvent("keydown", { key: "i", bubbles: true }));
    await app.flush();
    expect(mock.labelPosts).toBe(0);
  });

  it("service errors surface inline without losing position", async () => {
    const { app, mock } = await makeApp([0, 4], ["t1"]);
    press("ArrowRight");
    await app.flush();
    const before = app.state.frameIdx;
    // sabotage: drop the frame from the mock session to force 404s
    (mock as unknown as { session: { frames: number[] } }).session.frames = [0];
    press("i");
    await app.flush();
    expect(app.state.status).toContain("UnknownFrame");
    expect(app.state.frameIdx).toBe(before);
  });
});

describe("notes panel", () => {
  it("posts a note for the current unit after it is labeled", async () => {
    document.body.innerHTML = "";
    const { app } = await makeApp([0, 4], ["t1"]);
    press("s");
    await app.flush();
    press("ArrowLeft");
    await app.flush();
    const textarea = document.getElementById("note-input") as HTMLTextAreaElement;
    textarea.value = "stood back";
    (document.getElementById("note-submit") as HTMLButtonElement).click();
    await app.flush();
    expect(app.state.status).toContain("note attached");
  });
});
