import type { EstimateResponse, ProfileState } from "./types";

export interface BootstrapParams {
  iterations: number;
  seed: number;
}

// Fixed request-time bootstrap so standard errors render with every view
// and responses stay deterministic (and cacheable) for a given profile.
export const DEFAULT_BOOTSTRAP: BootstrapParams = { iterations: 2000, seed: 20210831 };

/**
 * Drop fields that do not apply to the selected sex, so a contradictory
 * profile can never leave the client regardless of stale control state.
 */
export function normalizeProfile(state: ProfileState): ProfileState {
  if (state.sex === "male") {
    return { ...state, pregnancies: 0 };
  }
  return { ...state, msm: false, prostate_screening: false };
}

export class EstimateAborted extends Error {
  constructor() {
    super("superseded by a newer estimate request");
  }
}

export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly bootstrap: BootstrapParams | null = DEFAULT_BOOTSTRAP,
  ) {}

  /** POST /api/estimate with latest-wins cancellation of the previous call. */
  async estimate(state: ProfileState): Promise<EstimateResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const body = {
      ...normalizeProfile(state),
      ...(this.bootstrap ? { bootstrap: this.bootstrap } : {}),
    };
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/estimate`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) throw new EstimateAborted();
      throw err;
    }
    if (controller.signal.aborted) throw new EstimateAborted();
    if (!response.ok) {
      throw new Error(`estimate request failed with status ${response.status}`);
    }
    return (await response.json()) as EstimateResponse;
  }
}
