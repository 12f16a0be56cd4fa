import init, {
  kernel_heatmap,
  degree_profile,
  cut_norm_between,
  compare_densities,
} from "./pkg/graphon_demo.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

function report(id, text, error = false) {
  const el = $(id);
  el.textContent = text;
  el.className = error ? "out err" : "out";
}

function guarded(id, f) {
  return () => {
    try {
      f();
    } catch (e) {
      report(id, String(e.message ?? e), true);
    }
  };
}

function drawHeatmap(canvas, values, n) {
  const ctx = canvas.getContext("2d");
  const lo = Math.min(0, ...values);
  const hi = Math.max(1, ...values);
  const s = canvas.width / n;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = (values[i * n + j] - lo) / (hi - lo);
      const g = Math.round(255 * (1 - v));
      ctx.fillStyle = `rgb(${g},${g},${Math.round(255 - 80 * v)})`;
      ctx.fillRect(j * s, i * s, Math.ceil(s), Math.ceil(s));
    }
  }
}

function drawLines(canvas, xs, series, yMax) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pad = 24;
  const x0 = xs[0];
  const x1 = xs[xs.length - 1];
  const top = yMax ?? Math.max(...series.flatMap((s) => Array.from(s.values)), 1e-12);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 4, w - pad - 4, h - pad - 4);
  ctx.fillStyle = "#555";
  ctx.fillText(x0.toFixed(2), pad, h - 8);
  ctx.fillText(x1.toFixed(2), w - 36, h - 8);
  ctx.fillText(top.toPrecision(2), 0, 12);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    s.values.forEach((v, i) => {
      const px = pad + ((xs[i] - x0) / (x1 - x0 || 1)) * (w - pad - 4);
      const py = h - pad - (v / top) * (h - pad - 8);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function heatmap() {
  const spec = $("hm-kernel").value;
  const n = 96;
  drawHeatmap($("hm-canvas"), kernel_heatmap(spec, n), n);
  const points = 200;
  const d = degree_profile(spec, points);
  const xs = Array.from({ length: points }, (_, i) => (i + 0.5) / points);
  drawLines($("deg-canvas"), xs, [{ values: d, color: COLORS[0] }], Math.max(1, ...d));
  const min = Math.min(...d);
  const max = Math.max(...d);
  report("hm-out", `degree range [${min.toFixed(4)}, ${max.toFixed(4)}]`);
}

function cutNorm() {
  const c = cut_norm_between($("cn-a").value, $("cn-b").value, 8);
  report("cn-out", `cut norm of W - V: ${c.toPrecision(6)}`);
}

function densities() {
  const r = compare_densities(
    $("fp-kernel").value,
    $("fp-coeffs").value,
    Number($("fp-t").value),
    Number($("fp-mean").value),
    1.0,
  );
  const xs = Array.from(r.centers());
  const series = [];
  for (let i = 0; i < r.block_count(); i++) {
    series.push({ values: r.block(i), color: COLORS[i % COLORS.length] });
  }
  series.push({ values: r.meanfield(), color: "#000", dash: [5, 4], width: 1 });
  drawLines($("fp-canvas"), xs, series);
  const weights = r.weights();
  const lines = Array.from(r.gaps()).map(
    (g, i) => `block ${i} (measure ${weights[i].toFixed(3)}): L1 to mean-field law ${g.toExponential(2)}`,
  );
  report("fp-out", lines.join("\n") + "\ndashed: single population with p = integral of W");
  r.free();
}

await init();
$("hm-go").addEventListener("click", guarded("hm-out", heatmap));
$("cn-go").addEventListener("click", guarded("cn-out", cutNorm));
$("fp-go").addEventListener("click", guarded("fp-out", densities));
guarded("hm-out", heatmap)();
guarded("cn-out", cutNorm)();
guarded("fp-out", densities)();
