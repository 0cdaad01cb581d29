import { vi } from "vitest";

import { ApiClient } from "../src/api";
import { App } from "../src/app";
import type { EstimateResponse, ProfileState } from "../src/types";

export type Router = (profile: ProfileState) => EstimateResponse | Error;

export interface Harness {
  root: HTMLElement;
  app: App;
  requests: ProfileState[];
  signals: AbortSignal[];
  flush: () => Promise<void>;
}

/** Mount the app against a fetch stub that routes request bodies to fixtures. */
export function mount(route: Router): Harness {
  const requests: ProfileState[] = [];
  const signals: AbortSignal[] = [];
  const fetchStub = vi.fn(async (_url: unknown, init?: RequestInit) => {
    const body = JSON.parse(String(init?.body)) as ProfileState;
    requests.push(body);
    if (init?.signal) signals.push(init.signal);
    const result = route(body);
    if (result instanceof Error) throw result;
    return {
      ok: true,
      status: 200,
      json: async () => result,
    } as Response;
  });
  vi.stubGlobal("fetch", fetchStub);

  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const app = new App(root, new ApiClient(""));
  const flush = async () => {
    await vi.advanceTimersByTimeAsync(300);
    await vi.advanceTimersByTimeAsync(0);
  };
  return { root, app, requests, signals, flush };
}

export function headlineText(root: HTMLElement): string {
  return root.querySelector(".headline-value")?.textContent ?? "";
}

export function rowValues(root: HTMLElement): string[] {
  return [...root.querySelectorAll(".disease-value")].map(
    (n) => n.textContent ?? "",
  );
}

export function rowNames(root: HTMLElement): string[] {
  return [...root.querySelectorAll(".disease-name")].map(
    (n) => n.textContent ?? "",
  );
}

export function setSex(root: HTMLElement, sex: "female" | "male"): void {
  const radio = root.querySelector<HTMLInputElement>(
    `input[name="sex"][value="${sex}"]`,
  );
  if (!radio) throw new Error("sex radio not found");
  radio.checked = true;
  radio.dispatchEvent(new Event("change"));
}

export function clickToggle(root: HTMLElement, id: string): void {
  const box = root.querySelector<HTMLInputElement>(`#toggle-${id}`);
  if (!box) throw new Error(`toggle ${id} not found`);
  box.checked = !box.checked;
  box.dispatchEvent(new Event("change"));
}

export function setPregnancies(root: HTMLElement, value: number): void {
  const input = root.querySelector<HTMLInputElement>("#pregnancies");
  if (!input) throw new Error("pregnancies input not found");
  input.value = String(value);
  input.dispatchEvent(new Event("change"));
}
