import init, { run_search, novelty_field, indicators } from "./pkg/pdns_demo.js";

const PAD = 20;

function frame(canvas) {
  const ctx = canvas.getContext("2d");
  const size = canvas.width - 2 * PAD;
  const toPx = ([x, y]) => [PAD + x * size, canvas.height - PAD - y * size];
  const fromPx = (px, py) => [(px - PAD) / size, (canvas.height - PAD - py) / size];
  return { ctx, size, toPx, fromPx };
}

function axes(f, canvas) {
  const { ctx, toPx } = f;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(...toPx([0, 1]), f.size, f.size);
}

function dots(f, points, color, r = 4) {
  f.ctx.fillStyle = color;
  for (const p of points) {
    const [x, y] = f.toPx(p);
    f.ctx.beginPath();
    f.ctx.arc(x, y, r, 0, 2 * Math.PI);
    f.ctx.fill();
  }
}

function staircase(f, points, color) {
  const pts = [...points].sort((a, b) => a[0] - b[0]);
  if (!pts.length) return;
  const { ctx, toPx } = f;
  ctx.strokeStyle = color;
  ctx.beginPath();
  ctx.moveTo(...toPx([pts[0][0], 1.01]));
  for (let i = 0; i < pts.length; i++) {
    ctx.lineTo(...toPx(pts[i]));
    const next = i + 1 < pts.length ? pts[i + 1][0] : 1.01;
    ctx.lineTo(...toPx([next, pts[i][1]]));
  }
  ctx.stroke();
}

function call(fn, request, out) {
  try {
    out.classList.remove("err");
    return JSON.parse(fn(JSON.stringify(request)));
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
    return null;
  }
}

function clickPoint(canvas, f, event) {
  const rect = canvas.getBoundingClientRect();
  const [x, y] = f.fromPx(event.clientX - rect.left, event.clientY - rect.top);
  return [Math.min(1, Math.max(0, x)), Math.min(1, Math.max(0, y))];
}

// 1. search
function setupSearch() {
  const canvas = document.getElementById("search-canvas");
  const f = frame(canvas);
  const out = document.getElementById("s-out");
  const slider = document.getElementById("s-slider");
  let view = null;
  const num = (id) => Number(document.getElementById(id).value);

  function draw() {
    axes(f, canvas);
    if (!view) return;
    const g = view.generations[Number(slider.value)];
    dots(f, view.true_front, "#bbb", 5);
    staircase(f, g.archive, "#36c");
    dots(f, g.archive, "#36c", 3);
    out.textContent =
      `${view.label} on ${view.genotypes} genotypes\n` +
      `generation ${g.generation}  cost ${g.cost_seconds.toFixed(0)} s\n` +
      `archive ${g.archive.length}  true front ${view.true_front.length}\n` +
      `IGD+ ${g.igd_plus.toFixed(4)}  HV ${g.hypervolume.toFixed(4)} / ${view.oracle_hypervolume.toFixed(4)}`;
  }

  document.getElementById("s-run").addEventListener("click", () => {
    const metrics = [...document.querySelectorAll(".s-metric:checked")].map((c) => c.value);
    const result = call(run_search, {
      algorithm: document.getElementById("s-alg").value,
      positions: num("s-pos"),
      choices: num("s-ch"),
      correlation: num("s-corr"),
      bench_seed: num("s-bseed"),
      metrics: [...metrics, "flops"],
      population: num("s-pop"),
      generations: num("s-gen"),
      seed: num("s-seed"),
    }, out);
    if (!result) return;
    view = result;
    slider.max = String(view.generations.length - 1);
    slider.value = slider.max;
    draw();
  });
  slider.addEventListener("input", draw);
  axes(f, canvas);
}

// 2. novelty field
function setupField() {
  const canvas = document.getElementById("field-canvas");
  const f = frame(canvas);
  const out = document.getElementById("f-out");
  let points = [[0.15, 0.7], [0.45, 0.4], [0.8, 0.15]];

  function draw() {
    axes(f, canvas);
    if (!points.length) {
      out.textContent = "click to place points";
      return;
    }
    const v = call(novelty_field, { points, resolution: 48 }, out);
    if (!v) return;
    const n = v.field.length;
    const cell = f.size / n;
    const scale = Math.max(Math.abs(v.min), Math.abs(v.max)) || 1;
    for (let row = 0; row < n; row++) {
      for (let col = 0; col < n; col++) {
        const s = v.field[row][col];
        const t = Math.min(1, Math.abs(s) / scale);
        const positive = s > 0 || Object.is(s, 0);
        const shade = Math.round(255 * (1 - 0.85 * t));
        f.ctx.fillStyle = positive ? `rgb(${shade},${shade},255)` : `rgb(255,${shade},${shade})`;
        const [x, y] = f.toPx([col / n, (row + 1) / n]);
        f.ctx.fillRect(x, y, Math.ceil(cell), Math.ceil(cell));
      }
    }
    dots(f, v.rejected, "#999", 4);
    dots(f, v.members, "#111", 5);
    out.textContent = `${v.members.length} members, ${v.rejected.length} dominated\n` +
      `score range ${v.min.toFixed(3)} .. ${v.max.toFixed(3)}`;
  }

  canvas.addEventListener("click", (e) => {
    points.push(clickPoint(canvas, f, e));
    draw();
  });
  document.getElementById("f-clear").addEventListener("click", () => { points = []; draw(); });
  document.getElementById("f-undo").addEventListener("click", () => { points.pop(); draw(); });
  draw();
}

// 3. indicators
function setupIndicators() {
  const canvas = document.getElementById("ind-canvas");
  const f = frame(canvas);
  const out = document.getElementById("i-out");
  const reference = Array.from({ length: 25 }, (_, i) => {
    const a = (Math.PI / 2) * (i / 24);
    return [1 - Math.sin(a), 1 - Math.cos(a)];
  });
  let front = [];

  function draw() {
    axes(f, canvas);
    staircase(f, reference, "#bbb");
    dots(f, reference, "#bbb", 2);
    if (!front.length) {
      out.textContent = "click to add front points";
      return;
    }
    const v = call(indicators, { front, reference_front: reference }, out);
    if (!v) return;
    staircase(f, v.nondominated, "#c60");
    dots(f, front, "#999", 3);
    dots(f, v.nondominated, "#c60", 4);
    out.textContent =
      `IGD+ ${v.igd_plus.toFixed(4)}\n` +
      `HV   ${v.hypervolume.toFixed(4)} (reference front ${v.reference_hypervolume.toFixed(4)})\n` +
      `${v.nondominated.length} of ${front.length} points non-dominated`;
  }

  canvas.addEventListener("click", (e) => {
    front.push(clickPoint(canvas, f, e));
    draw();
  });
  document.getElementById("i-clear").addEventListener("click", () => { front = []; draw(); });
  draw();
}

await init();
setupSearch();
setupField();
setupIndicators();
