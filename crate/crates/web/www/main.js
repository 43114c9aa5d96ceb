import init, { ml_curve, well_probability, energy_curve } from "./pkg/tfse_web.js";

const COLORS = ["#1f5fbf", "#d0602a", "#2a8f4a", "#8a3fb0"];

function $(id) {
  return document.getElementById(id);
}

// Splits a flat row-major array into columns.
function columns(flat, stride) {
  const rows = flat.length / stride;
  const cols = Array.from({ length: stride }, () => new Float64Array(rows));
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < stride; c++) cols[c][r] = flat[r * stride + c];
  }
  return cols;
}

function niceTicks(lo, hi, count) {
  const span = hi - lo || 1;
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= raw);
  const ticks = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) ticks.push(v);
  return ticks;
}

function fmt(v) {
  if (v === 0) return "0";
  const a = Math.abs(v);
  return a >= 1e4 || a < 1e-3 ? v.toExponential(0) : String(+v.toPrecision(4));
}

// series: [{ x, y, color, label, dashed }]; opts.logX draws x on a log10 axis.
function plot(canvas, series, opts = {}) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);

  const tx = opts.logX ? Math.log10 : (v) => v;
  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      const x = tx(s.x[i]), y = s.y[i];
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      xmin = Math.min(xmin, x); xmax = Math.max(xmax, x);
      ymin = Math.min(ymin, y); ymax = Math.max(ymax, y);
    }
  }
  if (opts.ymin !== undefined) ymin = Math.min(ymin, opts.ymin);
  const pad = 0.06 * (ymax - ymin || 1);
  ymin -= pad; ymax += pad;

  const m = { l: 56, r: 12, t: 10, b: 30 };
  const px = (x) => m.l + ((tx(x) - xmin) / (xmax - xmin || 1)) * (w - m.l - m.r);
  const py = (y) => h - m.b - ((y - ymin) / (ymax - ymin || 1)) * (h - m.t - m.b);

  ctx.font = "12px system-ui, sans-serif";
  ctx.fillStyle = "#555";
  ctx.strokeStyle = "#eee";
  ctx.lineWidth = 1;
  for (const v of niceTicks(ymin, ymax, 5)) {
    const y = py(v);
    ctx.beginPath(); ctx.moveTo(m.l, y); ctx.lineTo(w - m.r, y); ctx.stroke();
    ctx.textAlign = "right"; ctx.textBaseline = "middle";
    ctx.fillText(fmt(v), m.l - 6, y);
  }
  const xt = opts.logX
    ? niceTicks(xmin, xmax, 6).filter(Number.isInteger).map((e) => Math.pow(10, e))
    : niceTicks(xmin, xmax, 8);
  for (const v of xt) {
    const x = px(v);
    ctx.beginPath(); ctx.moveTo(x, m.t); ctx.lineTo(x, h - m.b); ctx.stroke();
    ctx.textAlign = "center"; ctx.textBaseline = "top";
    ctx.fillText(fmt(v), x, h - m.b + 6);
  }
  ctx.textAlign = "right";
  ctx.fillText(opts.xlabel || "t", w - m.r, h - m.b - 14);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.dashed ? 1.2 : 1.8;
    ctx.setLineDash(s.dashed ? [6, 4] : []);
    ctx.beginPath();
    let pen = false;
    for (let i = 0; i < s.x.length; i++) {
      if (!Number.isFinite(s.y[i])) { pen = false; continue; }
      const x = px(s.x[i]), y = py(s.y[i]);
      pen ? ctx.lineTo(x, y) : ctx.moveTo(x, y);
      pen = true;
    }
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function legend(el, series) {
  el.innerHTML = series
    .map((s) => `<span><i style="background:${s.color}"></i>${s.label}</span>`)
    .join("");
}

// Wires sliders to their <output> and reruns `draw` on change.
function bind(ids, draw, statusId) {
  const run = () => {
    for (const id of ids) {
      const input = $(id);
      const out = input.parentElement.querySelector("output");
      if (out) out.textContent = input.value;
    }
    try {
      draw();
      $(statusId).textContent = "";
    } catch (e) {
      $(statusId).textContent = String(e.message || e);
    }
  };
  for (const id of ids) $(id).addEventListener("input", run);
  run();
}

function drawMl() {
  const nu = +$("ml-nu").value, sigma = +$("ml-sigma").value, tmax = +$("ml-tmax").value;
  const plus = $("ml-ray").value === "plus";
  const [t, re, im, , , reD] = columns(ml_curve(nu, sigma, plus, tmax, 600), 7);
  const series = [
    { x: t, y: re, color: COLORS[0], label: "Re E" },
    { x: t, y: im, color: COLORS[1], label: "Im E" },
    { x: t, y: reD, color: COLORS[2], label: "Re F (decay part)", dashed: true },
  ];
  plot($("ml-plot"), series);
  legend($("ml-legend"), series);
}

function drawWell() {
  const nu = +$("wp-nu").value, n = +$("wp-n").value, tmax = +$("wp-tmax").value;
  const flat = well_probability(nu, n, tmax, 800);
  const limit = flat[flat.length - 1];
  const [t, p] = columns(flat.subarray(0, flat.length - 2), 2);
  const series = [
    { x: t, y: p, color: COLORS[0], label: "|A(t)|²" },
    { x: [t[0], t[t.length - 1]], y: [limit, limit], color: COLORS[1], label: `1/ν² = ${fmt(limit)}`, dashed: true },
  ];
  plot($("wp-plot"), series, { ymin: 0 });
  legend($("wp-legend"), series);
}

function drawEnergy() {
  const nu = +$("en-nu").value, n = +$("en-n").value;
  const flat = energy_curve(nu, n, 0.05, 1e4, 400);
  const limit = flat[flat.length - 2];
  const [t, re, im] = columns(flat.subarray(0, flat.length - 3), 3);
  const series = [
    { x: t, y: re, color: COLORS[0], label: "Re E_n(t)" },
    { x: t, y: im, color: COLORS[1], label: "Im E_n(t)" },
    { x: [t[0], t[t.length - 1]], y: [limit, limit], color: COLORS[2], label: `limit ${fmt(limit)}`, dashed: true },
  ];
  plot($("en-plot"), series, { logX: true });
  legend($("en-legend"), series);
}

await init();
bind(["ml-nu", "ml-sigma", "ml-tmax", "ml-ray"], drawMl, "ml-status");
bind(["wp-nu", "wp-n", "wp-tmax"], drawWell, "wp-status");
bind(["en-nu", "en-n"], drawEnergy, "en-status");
window.addEventListener("resize", () => { drawMl(); drawWell(); drawEnergy(); });
