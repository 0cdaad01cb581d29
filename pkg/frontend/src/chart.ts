import { formatPercent, formatPlusMinus } from "./format";
import type { EstimateResponse, PerDiseaseRisk } from "./types";

/**
 * Horizontal per-disease bars in the order the API returns them (already
 * sorted by descending risk), with SE whiskers when present and a ghost bar
 * from the previous estimate for visual what-if comparison.
 */
export function renderBreakdown(
  response: EstimateResponse,
  previous: EstimateResponse | null,
): HTMLElement {
  const root = document.createElement("div");
  root.className = "breakdown";
  if (response.per_disease.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent =
      "No screenings are recommended for this profile, so there is no " +
      "false-positive risk to show.";
    root.append(empty);
    return root;
  }
  const ghosts = new Map<string, PerDiseaseRisk>(
    (previous?.per_disease ?? []).map((row) => [row.disease_id, row]),
  );
  for (const row of response.per_disease) {
    root.append(renderRow(row, ghosts.get(row.disease_id) ?? null));
  }
  return root;
}

function renderRow(row: PerDiseaseRisk, ghost: PerDiseaseRisk | null): HTMLElement {
  const item = document.createElement("div");
  item.className = "disease-row";
  item.dataset.diseaseId = row.disease_id;

  const name = document.createElement("span");
  name.className = "disease-name";
  name.textContent = row.display_name;
  const occasions = document.createElement("span");
  occasions.className = "disease-occasions";
  occasions.textContent =
    row.occasions === 1 ? "1 screening" : `${row.occasions} screenings`;

  const track = document.createElement("div");
  track.className = "bar-track";
  if (ghost && ghost.estimate !== row.estimate) {
    const ghostBar = document.createElement("div");
    ghostBar.className = "bar ghost";
    ghostBar.style.width = `${ghost.estimate * 100}%`;
    ghostBar.title = `previous: ${formatPercent(ghost.estimate)}`;
    track.append(ghostBar);
  }
  const bar = document.createElement("div");
  bar.className = "bar";
  bar.style.width = `${row.estimate * 100}%`;
  track.append(bar);
  if (row.se !== null) {
    const whisker = document.createElement("div");
    whisker.className = "whisker";
    whisker.style.left = `${Math.max(0, (row.estimate - row.se) * 100)}%`;
    whisker.style.width = `${2 * row.se * 100}%`;
    track.append(whisker);
  }

  const value = document.createElement("span");
  value.className = "disease-value";
  value.textContent = `${formatPercent(row.estimate)} ${formatPlusMinus(row.se)}`.trim();

  item.append(name, occasions, track, value);
  return item;
}
