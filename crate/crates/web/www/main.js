import init, { smoothing_curve, hodge_slice, picard_history } from "./pkg/mhdlab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function logPlot(canvas, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pts = series.flatMap((s) => s.x.map((x, i) => [x, s.y[i]])).filter(([x, y]) => x > 0 && y > 0);
  if (pts.length === 0) return;
  const lx = pts.map(([x]) => Math.log10(x));
  const ly = pts.map(([, y]) => Math.log10(y));
  const [x0, x1] = [Math.min(...lx), Math.max(...lx)];
  const [y0, y1] = [Math.min(...ly), Math.max(...ly)];
  const pad = 30;
  const sx = (x) => pad + ((Math.log10(x) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((Math.log10(y) - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.fillText(`1e${y1.toFixed(1)}`, 2, pad);
  ctx.fillText(`1e${y0.toFixed(1)}`, 2, h - pad);
  ctx.fillText(`1e${x0.toFixed(1)}`, pad, h - 8);
  ctx.fillText(`1e${x1.toFixed(1)}`, w - pad - 30, h - 8);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.x.forEach((x, i) => {
      if (!(x > 0 && s.y[i] > 0)) return;
      i === 0 ? ctx.moveTo(sx(x), sy(s.y[i])) : ctx.lineTo(sx(x), sy(s.y[i]));
    });
    ctx.stroke();
  }
}

function heatmap(canvas, n, values, scale) {
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / n;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = Math.min(1, values[i * n + j] / scale);
      ctx.fillStyle = `rgb(${Math.round(255 * v)}, ${Math.round(80 * v)}, ${Math.round(255 * (1 - v))})`;
      ctx.fillRect(j * cell, (n - 1 - i) * cell, cell + 1, cell + 1);
    }
  }
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    $(out).textContent = `error: ${e.message ?? e}`;
  }
}

function runSmoothing() {
  guard("s-out", () => {
    const c = smoothing_curve(num("s-n"), num("s-p"), num("s-q"), num("s-w"));
    const t = c.times();
    const r = c.ratios();
    const anchor = r[Math.floor(r.length / 2)] / Math.pow(t[Math.floor(t.length / 2)], c.expected);
    logPlot($("s-plot"), [
      { x: t, y: r, color: "#c33" },
      { x: t, y: t.map((s) => anchor * Math.pow(s, c.expected)), color: "#39c" },
    ]);
    $("s-out").textContent = `fitted slope ${c.slope.toFixed(4)}, predicted ${c.expected.toFixed(4)}`;
  });
}

function runHodge() {
  guard("h-out", () => {
    const s = hodge_slice(num("h-n"), num("h-k"), BigInt(num("h-seed")));
    const field = s.field();
    const scale = Math.max(...field, 1e-300);
    heatmap($("h-field"), s.n, field, scale);
    heatmap($("h-exact"), s.n, s.exact(), scale);
    heatmap($("h-coexact"), s.n, s.coexact(), scale);
    $("h-out").textContent = `|f|, |exact part|, |coexact part| on x3 = 0; relative inner product ${s.orthogonality.toExponential(2)}`;
  });
}

function runPicard() {
  guard("p-out", () => {
    const h = picard_history($("p-preset").value, num("p-a"), num("p-t"), num("p-n"));
    const r = h.residuals();
    logPlot($("p-plot"), [{ x: r.map((_, i) => i + 1), y: r, color: "#2a2" }]);
    const state = h.diverged ? "diverged" : h.converged ? "converged" : "not converged";
    $("p-out").textContent = `${state} after ${r.length} iterations, largest residual ratio ${h.max_ratio.toFixed(3)}`;
  });
}

await init();
$("s-run").onclick = runSmoothing;
$("h-run").onclick = runHodge;
$("p-run").onclick = runPicard;
runHodge();
