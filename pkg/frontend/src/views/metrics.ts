/** Comparison table with signed deltas, plus density images by artifact hash. */

import type { ComparisonRow } from "../types.js";

export function renderMetricsTable(rows: ComparisonRow[]): HTMLElement {
  const table = document.createElement("table");
  table.className = "metrics-table";
  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const column of ["metric", "a", "b", "delta", "percent"]) {
    const cell = document.createElement("th");
    cell.textContent = column;
    headRow.appendChild(cell);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const body = document.createElement("tbody");
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.append(
      cell(row.metric),
      cell(formatNumber(row.a)),
      cell(formatNumber(row.b)),
      cell(formatSigned(row.delta)),
    );
    const percent = cell(
      row.division_guard || row.percent_change === null
        ? "n/a (baseline 0)"
        : `${formatSigned(row.percent_change)}%`,
    );
    percent.className = "percent";
    tr.appendChild(percent);
    body.appendChild(tr);
  }
  table.appendChild(body);
  return table;
}

function cell(text: string): HTMLTableCellElement {
  const element = document.createElement("td");
  element.textContent = text;
  return element;
}

export function renderDensityImage(hash: string | null, artifactUrl: (hash: string) => string): HTMLElement {
  const figure = document.createElement("figure");
  figure.className = "density-figure";
  if (hash === null || hash === "") {
    figure.appendChild(placeholder());
    return figure;
  }
  const image = document.createElement("img");
  image.src = artifactUrl(hash);
  image.alt = "per-edge density heatmap";
  image.addEventListener("error", () => {
    image.replaceWith(placeholder());
  });
  figure.appendChild(image);
  return figure;
}

function placeholder(): HTMLElement {
  const box = document.createElement("div");
  box.className = "image-placeholder";
  box.textContent = "no heatmap available";
  return box;
}

function formatNumber(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(Math.abs(value) < 10 ? 2 : 1);
}

export function formatSigned(value: number): string {
  const text = formatNumber(value);
  return value > 0 ? `+${text}` : text;
}
