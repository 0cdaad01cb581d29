import { ApiClient, EstimateAborted } from "./api";
import { renderBreakdown } from "./chart";
import { formatPercent, formatPlusMinus } from "./format";
import { ProfileForm } from "./form";
import { DEFAULT_PROFILE, type EstimateResponse, type ProfileState } from "./types";

const DEBOUNCE_MS = 250;

/**
 * The calculator page: profile form on the left, headline risk and
 * per-disease breakdown on the right. Every number shown is an API value;
 * form changes trigger one debounced, latest-wins estimate request.
 */
export class App {
  private readonly client: ApiClient;
  private readonly form: ProfileForm;
  private readonly headline: HTMLElement;
  private readonly headlineValue: HTMLElement;
  private readonly breakdownHost: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly extrapolationNote: HTMLElement;
  private readonly footer: HTMLElement;
  private readonly ghostChip: HTMLElement;

  private current: EstimateResponse | null = null;
  private previous: EstimateResponse | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(root: HTMLElement, client: ApiClient = new ApiClient()) {
    this.client = client;
    root.classList.add("fprisk-app");

    this.form = new ProfileForm(DEFAULT_PROFILE, () => this.scheduleFetch());

    this.headline = el("div", "headline");
    this.headlineValue = el("span", "headline-value");
    this.headlineValue.setAttribute("aria-live", "polite");
    const headlineLabel = el("span", "headline-label");
    headlineLabel.textContent = "Lifetime chance of at least one false positive";
    this.ghostChip = el("span", "ghost-chip");
    this.headline.append(headlineLabel, this.headlineValue, this.ghostChip);

    this.banner = el("div", "banner");
    this.banner.hidden = true;
    const bannerText = el("span", "banner-text");
    bannerText.textContent = "Could not reach the estimate service.";
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "banner-retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => this.fetchNow());
    this.banner.append(bannerText, retry);

    this.extrapolationNote = el("p", "extrapolation-note");
    this.extrapolationNote.hidden = true;
    this.extrapolationNote.textContent =
      "Pregnancy counts above two are outside the published range; the " +
      "schedule is extrapolated.";

    this.breakdownHost = el("div", "breakdown-host");
    this.footer = el("footer", "provenance");

    root.replaceChildren(
      this.form.element,
      this.banner,
      this.headline,
      this.extrapolationNote,
      this.breakdownHost,
      this.footer,
    );
    this.fetchNow();
  }

  private scheduleFetch() {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => this.fetchNow(), DEBOUNCE_MS);
  }

  fetchNow(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const state: ProfileState = this.form.value;
    return this.client.estimate(state).then(
      (response) => this.showResult(response),
      (err) => {
        if (!(err instanceof EstimateAborted)) this.showFailure();
      },
    );
  }

  private showResult(response: EstimateResponse) {
    this.previous = this.current;
    this.current = response;
    this.banner.hidden = true;
    this.headline.classList.remove("stale");

    const se = formatPlusMinus(response.total.se);
    this.headlineValue.textContent =
      `${formatPercent(response.total.estimate)}${se ? ` ${se}` : ""}`;

    if (this.previous && this.previous.total.estimate !== response.total.estimate) {
      this.ghostChip.textContent = `was ${formatPercent(this.previous.total.estimate)}`;
      this.ghostChip.hidden = false;
    } else {
      this.ghostChip.textContent = "";
      this.ghostChip.hidden = true;
    }

    this.extrapolationNote.hidden = !response.metadata.extrapolated;
    this.breakdownHost.replaceChildren(renderBreakdown(response, this.previous));

    const m = response.metadata;
    this.footer.textContent =
      `dataset ${m.dataset_version.slice(0, 12)} | schedule ${m.schedule_version}` +
      (m.iterations !== null ? ` | B=${m.iterations}, seed ${m.seed}` : "");
  }

  private showFailure() {
    this.banner.hidden = false;
    if (this.current) this.headline.classList.add("stale");
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}
