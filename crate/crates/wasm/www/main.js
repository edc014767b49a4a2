import init, { furstenbergPlane, deltaCoverage, gridRefine } from "./pkg/furstenberg_wasm.js";

const $ = (id) => document.getElementById(id);
let plane = null;

function drawPlane() {
  const canvas = $("plane-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!plane) return;
  const p = plane.p;
  const cell = canvas.width / p;
  // y grows upwards, like the usual picture of the plane.
  const at = ([x, y]) => [x * cell, canvas.height - (y + 1) * cell];

  ctx.fillStyle = "#eee";
  for (let x = 0; x < p; x++) for (let y = 0; y < p; y++) {
    const [cx, cy] = at([x, y]);
    ctx.fillRect(cx + 1, cy + 1, cell - 2, cell - 2);
  }
  const w = plane.witnesses[Number($("plane-dir").value)];
  ctx.fillStyle = "#9cf";
  for (const pt of w.points) {
    const [cx, cy] = at(pt);
    ctx.fillRect(cx + 1, cy + 1, cell - 2, cell - 2);
  }
  const onLine = new Set(w.points.map((pt) => pt.join(",")));
  for (const pt of plane.points) {
    const [cx, cy] = at(pt);
    ctx.fillStyle = onLine.has(pt.join(",")) ? "#c30" : "#333";
    ctx.beginPath();
    ctx.arc(cx + cell / 2, cy + cell / 2, Math.max(1.5, cell * 0.3), 0, 2 * Math.PI);
    ctx.fill();
  }
  $("plane-dir-label").textContent = `(${w.dir.join(", ")}): ${w.count} points on the witness line`;
}

function buildPlane() {
  try {
    plane = JSON.parse(furstenbergPlane(Number($("plane-p").value), $("plane-beta").value, Number($("plane-k").value)));
  } catch (e) {
    plane = null;
    $("plane-summary").innerHTML = `<span class="fail">${e.message ?? e}</span>`;
    drawPlane();
    return;
  }
  $("plane-dir").max = plane.witnesses.length - 1;
  $("plane-dir").value = 0;
  const ok = plane.min_count >= plane.threshold;
  $("plane-summary").innerHTML =
    `|S| = ${plane.size} of ${plane.p * plane.p} points; &Delta; = {${plane.delta.join(", ")}}, &mu; = ${plane.mu}, ` +
    `X = {${plane.multipliers.join(", ")}}; every direction meets a line in at least ` +
    `<span class="${ok ? "pass" : "fail"}">${plane.min_count}</span> points (target ${plane.threshold}).`;
  drawPlane();
}

function drawHistogram(hist) {
  const canvas = $("delta-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!hist) return;
  const entries = Object.entries(hist).map(([k, v]) => [Number(k), v]);
  const maxV = Math.max(...entries.map((e) => e[1]));
  const bw = canvas.width / entries.length;
  ctx.font = "10px sans-serif";
  entries.forEach(([size, count], i) => {
    const h = (canvas.height - 20) * (count / maxV);
    ctx.fillStyle = "#48a";
    ctx.fillRect(i * bw + 1, canvas.height - 14 - h, bw - 2, h);
    ctx.fillStyle = "#222";
    if (bw > 14 || i % Math.ceil(14 / bw) === 0) ctx.fillText(String(size), i * bw + 1, canvas.height - 3);
  });
}

function reportDelta() {
  let d;
  try {
    d = JSON.parse(deltaCoverage(Number($("delta-q").value), Number($("delta-k").value)));
  } catch (e) {
    $("delta-summary").innerHTML = `<span class="fail">${e.message ?? e}</span>`;
    drawHistogram(null);
    return;
  }
  const r = d.report;
  const fmt = (e) => (Array.isArray(e) ? `[${e.join(",")}]` : e);
  $("delta-summary").innerHTML =
    `${d.recipe.kind}: |&Delta;| = ${r.delta_size} (&radic;q &asymp; ${r.sqrt_q.toFixed(2)}), &mu; = ${fmt(d.mu)}; ` +
    `&mu;&Delta; &minus; &Delta; covers F<sub>q</sub>: <span class="${r.covered ? "pass" : "fail"}">${r.covered}</span>. ` +
    `Bars: number of x with each sumset size |x&Delta; + &Delta;|.`;
  drawHistogram(r.sumset_histogram);
}

function randomGrid() {
  const n = Number($("grid-n").value), b = Number($("grid-b").value), d = Number($("grid-d").value);
  const elements = [];
  const rec = (prefix) => {
    if (prefix.length === n) {
      if (Math.random() < d) elements.push(prefix);
      return;
    }
    for (let v = 0; v < b; v++) rec([...prefix, v]);
  };
  rec([]);
  $("grid-json").value = JSON.stringify({ n, elements });
}

function refineGrid() {
  try {
    const r = JSON.parse(gridRefine($("grid-json").value, Number($("grid-m").value), Number($("grid-c").value)));
    const c = r.certificate;
    $("grid-out").innerHTML =
      `<span class="${r.passes ? "pass" : "fail"}">${r.passes ? "all checks pass" : "a check failed"}</span>\n` +
      `|T| = ${c.t0}, |T1| = ${c.t1}, |T2| = ${c.t2}, N = ${c.N}, fibers of T2 = ${c.max_fibers}, min fiber = ${c.min_fiber}\n` +
      `conclusions: ${c.bounds_ok.join(", ")}; mass: ${c.mass_t1_ok}, ${c.mass_t2_ok}\n` +
      (r.lw_bound ? `Loomis-Whitney bound ${r.lw_bound.value.toFixed(3)} >= |T| = ${c.t0}\n` : "") +
      `\n${JSON.stringify(c, null, 2)}`;
  } catch (e) {
    $("grid-out").innerHTML = `<span class="fail">${e.message ?? e}</span>`;
  }
}

await init();
$("status").textContent = "Ready.";
$("plane-go").onclick = buildPlane;
$("plane-dir").oninput = drawPlane;
$("delta-go").onclick = reportDelta;
$("grid-random").onclick = randomGrid;
$("grid-go").onclick = refineGrid;
buildPlane();
reportDelta();
