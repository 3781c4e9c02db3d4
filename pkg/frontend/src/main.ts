/** Entry point: wire the app to the service named in the URL.
 *
 * Query parameters: ?api=http://host:port&session=ID&coder=NAME&pass=N
 * (api defaults to same origin; coder/pass default to c1/1).
 */

import { AnnotationApp } from "./app.js";
import { ApiClient } from "./api.js";

async function bootstrap(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? "";
  const sessionId = params.get("session");
  const coder = params.get("coder") ?? "c1";
  const passId = Number(params.get("pass") ?? "1");

  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  if (!sessionId) {
    root.textContent = "missing ?session=<id> query parameter";
    return;
  }
  const app = new AnnotationApp(new ApiClient(base), root);
  await app.load(sessionId, coder, passId);
}

bootstrap().catch((error: unknown) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to start: ${String(error)}`;
});
