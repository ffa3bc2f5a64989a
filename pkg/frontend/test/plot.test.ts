import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { afterAll, describe, expect, it } from "vitest";

import { MissingColumnError, readTrajectory } from "../src/csv";
import { main, parseArgs, plot } from "../src/plot";

const HEADER =
  "t,v_d,v_v,x1,x2,u,delta_hjb,p_batt,wc_norm,wa_norm,xtilde_norm," +
  "lambda_min_P,reset_count";

function makeTrajectory(path: string, n = 200, phase = 0): string {
  const rows = [HEADER];
  for (let k = 0; k < n; k++) {
    const t = k * 0.01;
    const vd = 5 + 3 * Math.sin(0.5 * t);
    const vv = vd - 0.2 * Math.sin(2 * t + phase);
    const x1 = vv - vd;
    const p = 4000 * Math.sin(0.3 * t + phase);
    rows.push(
      [t, vd, vv, x1, p, 40 * Math.sin(t), 0.1, p, 1, 1, 0.01, 0.5, 0].join(","),
    );
  }
  writeFileSync(path, rows.join("\n") + "\n");
  return path;
}

const dir = mkdtempSync(join(tmpdir(), "evaci-plots-"));
const runA = makeTrajectory(join(dir, "trajectory_aci.csv"), 200, 0);
const runB = makeTrajectory(join(dir, "trajectory_pid.csv"), 200, 1);

describe("readTrajectory", () => {
  it("loads requested columns", () => {
    const t = readTrajectory(runA, ["t", "v_v"]);
    expect(t.columns.get("t")!.length).toBe(200);
    expect(t.columns.get("v_v")![0]).toBeCloseTo(5, 5);
  });

  it("names a column missing from the header", () => {
    const bad = join(dir, "bad_header.csv");
    writeFileSync(bad, "t,v_d,v_v\n0,0,0\n");
    expect(() => readTrajectory(bad, ["t", "p_batt"])).toThrowError(
      /missing column "p_batt"/,
    );
  });

  it("names the column lost to a truncated row", () => {
    const lines = readFileSync(runA, "utf8").split("\n");
    const cut = lines.slice(0, 50);
    cut.push(lines[50].split(",").slice(0, 6).join(","));  // row cut mid-way
    const bad = join(dir, "truncated.csv");
    writeFileSync(bad, cut.join("\n") + "\n");
    expect(() => readTrajectory(bad, ["t", "p_batt"])).toThrowError(
      MissingColumnError,
    );
    expect(() => readTrajectory(bad, ["t", "p_batt"])).toThrowError(
      /missing column "p_batt".*truncated/,
    );
  });

  it("rejects non-numeric fields", () => {
    const bad = join(dir, "nonnum.csv");
    writeFileSync(bad, "t,v_v\n0,fast\n");
    expect(() => readTrajectory(bad, ["t", "v_v"])).toThrowError(/not a number/);
  });
});

describe("plot", () => {
  it.each(["profile", "tracking_error", "power"] as const)(
    "renders a single-run %s figure",
    (kind) => {
      const out = join(dir, `single_${kind}.svg`);
      plot({ kind, inputs: [runA], output: out });
      const svg = readFileSync(out, "utf8");
      expect(svg).toContain("<svg");
      expect(svg).toContain("polyline");
      expect(svg).toContain("time [s]");
    },
  );

  it("overlays two runs with a legend", () => {
    const out = join(dir, "two_power.svg");
    plot({ kind: "power", inputs: [runA, runB], output: out,
           labels: ["aci", "pid"] });
    const svg = readFileSync(out, "utf8");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect(svg).toContain(">aci<");
    expect(svg).toContain(">pid<");
    expect(svg).toContain("net traction power [W]");
  });

  it("profile includes the desired-speed reference", () => {
    const out = join(dir, "profile_ref.svg");
    plot({ kind: "profile", inputs: [runA], output: out });
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain(">desired<");
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect(svg).toContain("stroke-dasharray");
  });

  it("is deterministic", () => {
    const o1 = join(dir, "det1.svg");
    const o2 = join(dir, "det2.svg");
    plot({ kind: "power", inputs: [runA], output: o1 });
    plot({ kind: "power", inputs: [runA], output: o2 });
    expect(readFileSync(o1, "utf8")).toBe(readFileSync(o2, "utf8"));
  });

  it("fails with a named column on a power plot without p_batt", () => {
    const bad = join(dir, "no_power.csv");
    writeFileSync(bad, "t,v_d,v_v,x1\n0,0,0,0\n0.001,0,0,0\n");
    expect(() => plot({ kind: "power", inputs: [bad], output: join(dir, "x.svg") }))
      .toThrowError(/missing column "p_batt"/);
  });

  it("rejects more than two runs", () => {
    expect(() => plot({
      kind: "power", inputs: [runA, runB, runA], output: join(dir, "x.svg"),
    })).toThrowError(/one or two/);
  });
});

describe("cli", () => {
  it("parses the full flag set", () => {
    const spec = parseArgs(["--kind", "profile", "--input", runA,
                            "--input2", runB, "--label", "a", "--label2", "b",
                            "--out", "fig.svg"]);
    expect(spec.kind).toBe("profile");
    expect(spec.inputs).toEqual([runA, runB]);
    expect(spec.labels).toEqual(["a", "b"]);
  });

  it("rejects unknown flags and missing values", () => {
    expect(() => parseArgs(["--kind", "power", "--wat"])).toThrowError(/--wat/);
    expect(() => parseArgs(["--kind"])).toThrowError(/needs a value/);
    expect(() => parseArgs(["--input", runA, "--out", "x.svg"]))
      .toThrowError(/--kind/);
  });

  it("main returns 0 on success and 1 on errors", () => {
    const out = join(dir, "cli.svg");
    expect(main(["--kind", "tracking_error", "--input", runA, "--out", out]))
      .toBe(0);
    expect(main(["--kind", "power", "--input", "/does/not/exist.csv",
                 "--out", out])).toBe(1);
  });
});

afterAll(() => {
  // tmpdir contents are left for inspection on failure; nothing to clean
});
