import init, { hull_dimensions, run_selection, score } from "./pkg/geofs_web.js";

const $ = (id) => document.getElementById(id);

const SAMPLE_VECTORS = `spam\t0:1 2:1 5:1
spam\t1:1 2:1 4:1
spam\t0:1 1:1 5:2
ham\t2:1 3:1 4:1
ham\t2:1 3:2 4:1
ham\t1:1 3:1 5:1
news\t0:1 3:1 4:2
news\t1:1 3:1 5:1`;
const SAMPLE_BOUNDARIES = `words\t0\t3\nchars\t3\t6`;

function guard(fn) {
  return () => {
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = e.message ?? String(e);
    }
  };
}

function showHull() {
  const r = JSON.parse(hull_dimensions($("points").value));
  $("hull-out").textContent =
    `${r.points} points in ${r.columns} columns\naffine dimension  ${r.affine}\nambient dimension ${r.ambient}`;
}

const fmt = (x) => x.toFixed(3);

function showSelection() {
  const r = JSON.parse(run_selection($("vectors").value, $("boundaries").value, $("f6").value));
  const out = $("select-out");
  out.replaceChildren();
  for (const p of r.partitions) {
    const h = document.createElement("h3");
    h.textContent = p.partition;
    const table = document.createElement("table");
    table.innerHTML =
      "<tr><th>subset</th><th>f1</th><th>f2</th><th>f3</th><th>f4</th><th>f5</th><th>f6</th>" +
      "<th>lin</th><th>log</th><th>verdict</th></tr>";
    for (const s of p.subsets) {
      const tr = document.createElement("tr");
      if (s.optimal) tr.className = "optimal";
      const cells = [s.subset, ...s.f.map(fmt), fmt(s.lin), fmt(s.log), s.optimal ? "optimal" : "suboptimal"];
      for (const c of cells) {
        const td = document.createElement("td");
        td.textContent = c;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    out.append(h, table);
  }
}

function buildSliders() {
  const box = $("sliders");
  for (let i = 1; i <= 6; i++) {
    const row = document.createElement("div");
    row.className = "slider";
    row.innerHTML = `<span>z${i}</span><input type="range" min="-3" max="3" step="0.05" value="0"><output>0.00</output>`;
    box.appendChild(row);
  }
  box.addEventListener("input", guard(showScore));
}

function showScore() {
  const inputs = [...$("sliders").querySelectorAll("input")];
  const z = new Float64Array(inputs.map((x) => Number(x.value)));
  inputs.forEach((x) => (x.nextElementSibling.textContent = Number(x.value).toFixed(2)));
  const r = JSON.parse(score(z));
  $("score-out").textContent =
    `linear   ${r.lin.toFixed(4)}  (needs > 0)\nlogistic ${r.log.toFixed(4)}  (needs >= 0.5)\n` +
    `verdict  ${r.optimal ? "optimal" : "suboptimal"}`;
}

await init();
$("vectors").value = SAMPLE_VECTORS;
$("boundaries").value = SAMPLE_BOUNDARIES;
$("hull-go").addEventListener("click", guard(showHull));
$("select-go").addEventListener("click", guard(showSelection));
buildSliders();
guard(showHull)();
guard(showScore)();
