import init, { runScenario, checkClosedForm, checkSequence, recursionTable } from "./pkg/spectra_web.js";

const PRESETS = ["square", "drift_interval", "hemisphere", "anisotropic", "associate"];

const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

const $ = (id) => document.getElementById(id);

function fmt(x, digits = 6) {
  if (x === null || x === undefined) return "";
  if (typeof x !== "number") return String(x);
  if (x !== 0 && (Math.abs(x) < 1e-3 || Math.abs(x) >= 1e5)) return x.toExponential(digits - 1);
  return x.toPrecision(digits);
}

function table(headers, rows, nameColumns = 1) {
  const head = "<tr>" + headers.map((h) => `<th>${h}</th>`).join("") + "</tr>";
  const body = rows
    .map((r) => "<tr>" + r.map((c, i) => `<td${i < nameColumns ? ' class="name"' : ""}>${c}</td>`).join("") + "</tr>")
    .join("");
  return `<table>${head}${body}</table>`;
}

function groupReports(reports) {
  const groups = new Map();
  for (const r of reports) {
    if (!groups.has(r.name)) groups.set(r.name, { evaluated: 0, violations: 0, skipped: 0, worst: null, worstK: null });
    const g = groups.get(r.name);
    if (r.status !== "evaluated") {
      g.skipped += 1;
      continue;
    }
    g.evaluated += 1;
    if (!r.holds) g.violations += 1;
    if (r.ratio !== null && (g.worst === null || r.ratio > g.worst)) {
      g.worst = r.ratio;
      g.worstK = r.k;
    }
  }
  return [...groups.entries()].sort((a, b) => a[0].localeCompare(b[0]));
}

function reportTable(reports) {
  const rows = groupReports(reports).map(([name, g]) => [
    name,
    g.evaluated,
    g.skipped,
    g.violations ? `<span class="fail">${g.violations}</span>` : '<span class="ok">0</span>',
    fmt(g.worst, 5),
    g.worstK ?? "",
  ]);
  return table(["check", "evaluated", "not evaluated", "violated", "max lhs/rhs", "at k"], rows);
}

function weylText(weyl) {
  if (!weyl || weyl.skipped) return `<p class="muted">Weyl fit skipped: ${weyl ? weyl.skipped : ""}</p>`;
  return `<p>Weyl fit over k = ${weyl.k_min}..${weyl.k_max}: exponent ${fmt(weyl.exponent, 4)} (expected ${fmt(weyl.expected_exponent, 4)}),
    constant ${fmt(weyl.constant, 5)} against W = ${fmt(weyl.target, 5)}.</p>`;
}

function drawLines(canvas, series, { yRef = null, xLabel = "k", yLabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  const pad = { l: 56, r: 130, t: 12, b: 32 };
  ctx.clearRect(0, 0, w, h);
  const pts = series.flatMap((s) => s.points);
  if (!pts.length) return;
  let [x0, x1] = [Math.min(...pts.map((p) => p[0])), Math.max(...pts.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...pts.map((p) => p[1])), Math.max(...pts.map((p) => p[1]))];
  if (yRef !== null) { y0 = Math.min(y0, yRef); y1 = Math.max(y1, yRef); }
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const margin = 0.05 * (y1 - y0);
  y0 -= margin; y1 += margin;
  const sx = (x) => pad.l + ((x - x0) / (x1 - x0)) * (w - pad.l - pad.r);
  const sy = (y) => h - pad.b - ((y - y0) / (y1 - y0)) * (h - pad.t - pad.b);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad.l, pad.t, w - pad.l - pad.r, h - pad.t - pad.b);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  for (let i = 0; i <= 4; i++) {
    const y = y0 + (i / 4) * (y1 - y0);
    ctx.fillText(fmt(y, 3), 4, sy(y) + 4);
  }
  ctx.fillText(`${fmt(x0, 3)}`, pad.l, h - 12);
  ctx.fillText(`${fmt(x1, 3)}`, w - pad.r - 24, h - 12);
  ctx.fillText(xLabel, (w - pad.r + pad.l) / 2, h - 12);
  ctx.fillText(yLabel, pad.l + 4, pad.t + 12);
  if (yRef !== null) {
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#b00020";
    ctx.beginPath();
    ctx.moveTo(pad.l, sy(yRef));
    ctx.lineTo(w - pad.r, sy(yRef));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    ctx.strokeStyle = color;
    ctx.beginPath();
    s.points.forEach(([x, y], j) => (j ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.fillText(s.label, w - pad.r + 6, pad.t + 12 + 13 * i);
  });
}

function showError(id, e) {
  $(id).textContent = e ? `Error: ${e}` : "";
}

function runSelected() {
  showError("run-error", null);
  $("run-output").innerHTML = "";
  $("run-status").textContent = "solving...";
  setTimeout(() => {
    const started = performance.now();
    try {
      const out = JSON.parse(runScenario($("toml").value));
      $("run-status").textContent = `done in ${((performance.now() - started) / 1000).toFixed(2)} s`;
      renderScenario(out);
    } catch (e) {
      $("run-status").textContent = "";
      showError("run-error", e);
    }
  }, 20);
}

function renderScenario(out) {
  const levels = out.levels;
  const finest = levels[levels.length - 1];
  const conv = new Map(out.convergence.filter((r) => r.resolution === finest.resolution).map((r) => [r.index, r]));
  const rows = finest.eigenvalues.map((_, i) => {
    const c = conv.get(i + 1) || {};
    return [
      i + 1,
      ...levels.map((l) => fmt(l.eigenvalues[i], 8)),
      fmt(c.extrapolated, 8),
      fmt(c.order, 3),
      fmt(c.target, 8),
    ];
  });
  const headers = ["k", ...levels.map((l) => `res ${l.resolution} (${l.dofs} dofs)`), "extrapolated", "order", "exact"];
  const c = out.constants;
  const constRows = [
    ["vol", fmt(c.vol_omega)], ["H_0", fmt(c.h_0)], ["A_0", fmt(c.a_0)], ["eta_0", fmt(c.eta_0)],
    ["eta_bar_0", fmt(c.eta_bar_0)], ["T_*", fmt(c.t_star)], ["T_0", fmt(c.t_0)],
    ["tr T (inf, sup)", `${fmt(c.tr_t_inf)}, ${fmt(c.tr_t_sup)}`], ["upsilon shift", fmt(out.upsilon_shift)],
  ];
  const verdict = out.violations
    ? `<p class="fail">${out.violations} evaluated inequalities are violated.</p>`
    : '<p class="ok">Every evaluated inequality holds.</p>';
  $("run-output").innerHTML =
    `<h3>Eigenvalues (n = ${out.n}, m = ${out.m})</h3>` + table(headers, rows, 0) +
    `<div class="row"><div><h3>Geometric constants</h3>${table(["constant", "value"], constRows)}</div>` +
    `<div><h3>Inequalities on the finest mesh</h3>${verdict}${reportTable(out.reports)}</div></div>` +
    weylText(out.weyl);
}

function checkSpectrum() {
  showError("check-error", null);
  try {
    const source = document.querySelector('input[name="source"]:checked').value;
    const json = source === "closed"
      ? checkClosedForm($("domain").value, Number($("aspect").value), Number($("count").value))
      : checkSequence($("sequence").value, Number($("seq-n").value), Number($("seq-vol").value));
    const out = JSON.parse(json);
    const byName = new Map();
    for (const r of out.reports) {
      if (r.status !== "evaluated" || r.ratio === null) continue;
      if (!byName.has(r.name)) byName.set(r.name, []);
      byName.get(r.name).push([r.k, r.ratio]);
    }
    const series = [...byName.entries()].sort((a, b) => a[0].localeCompare(b[0])).map(([label, points]) => ({ label, points }));
    drawLines($("ratio-plot"), series, { yRef: 1, yLabel: "lhs / rhs" });
    const verdict = out.violations
      ? `<p class="fail">${out.violations} evaluated inequalities are violated.</p>`
      : '<p class="ok">Every evaluated inequality holds.</p>';
    $("check-output").innerHTML = `<p>${out.values.length} eigenvalues, n = ${out.n}, volume ${fmt(out.vol)}.</p>` +
      verdict + reportTable(out.reports) + weylText(out.weyl);
  } catch (e) {
    showError("check-error", e);
  }
}

function tabulate() {
  showError("rec-error", null);
  try {
    const out = JSON.parse(recursionTable(Number($("rec-n").value), Number($("rec-c").value), Number($("rec-k").value)));
    const points = out.rows.map((r) => [r.k, r.c_constant]);
    drawLines($("rec-plot"), [{ label: `C(${out.n}, k, ${out.c})`, points }], { yRef: 1, yLabel: "C" });
    const shown = out.rows.slice(0, 12).map((r) => [r.k, r.c_constant.toPrecision(12)]);
    $("rec-output").innerHTML = table(["k", "C(n, k, c)"], shown, 0) +
      (out.rows.length > 12 ? `<p class="muted">${out.rows.length - 12} more rows plotted.</p>` : "");
  } catch (e) {
    showError("rec-error", e);
  }
}

async function main() {
  await init();
  const select = $("preset");
  for (const name of PRESETS) select.add(new Option(name, name));
  const load = async () => ($("toml").value = await (await fetch(`presets/${select.value}.toml`)).text());
  select.addEventListener("change", load);
  await load();
  $("run").addEventListener("click", runSelected);
  $("check").addEventListener("click", checkSpectrum);
  $("tabulate").addEventListener("click", tabulate);
  checkSpectrum();
  tabulate();
}

main();
