import { ApiClient } from "./api";
import { App } from "./app";
import "./styles.css";

const base =
  (window as { FPRISK_API_BASE?: string }).FPRISK_API_BASE ??
  import.meta.env.VITE_API_BASE ??
  "";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new App(root, new ApiClient(base));
