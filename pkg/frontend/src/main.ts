import { ApiClient } from "./api";
import { App } from "./app";
import "./style.css";

const root = document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  const client = new ApiClient(params.get("api") ?? "");
  const app = new App(root, client);
  const session = params.get("session");
  if (session) {
    void app.resume(session);
  } else {
    app.renderStart();
  }
}
