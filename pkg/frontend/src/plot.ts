#!/usr/bin/env node
/**
 * Figure generation from trajectory CSV logs.
 *
 * Renders the simulator's per-step logs into static SVG figures:
 *
 *   profile         desired vs. achieved speed
 *   tracking_error  speed-tracking error over the cycle
 *   power           net traction power (battery sign convention)
 *
 * One or two runs can be overlaid (e.g. the learning controller against
 * the PID baseline from a comparison run):
 *
 *   evaci-plot --kind profile --input cmp/trajectory_aci.csv \
 *              --input2 cmp/trajectory_pid.csv --out profile.svg
 */
import { writeFileSync } from "fs";
import { basename } from "path";

import { ColumnName, Trajectory, column, readTrajectory } from "./csv";
import { Series, lineChart } from "./svg";

export type FigureKind = "profile" | "tracking_error" | "power";

export interface PlotSpec {
  kind: FigureKind;
  inputs: string[];          // 1 or 2 trajectory CSV paths
  output: string;            // SVG file to write
  labels?: string[];         // legend labels, defaults to file stems
}

const COLORS = ["#1965b0", "#dc050c"];

interface FigureDef {
  required: ColumnName[];
  title: string;
  yLabel: string;
  build(runs: Trajectory[], labels: string[]): Series[];
}

const FIGURES: Record<FigureKind, FigureDef> = {
  profile: {
    required: ["t", "v_d", "v_v"],
    title: "Desired profile versus achieved speed",
    yLabel: "speed [m/s]",
    build: (runs, labels) => {
      const series: Series[] = runs.map((r, i) => ({
        x: column(r, "t"),
        y: column(r, "v_v"),
        label: labels[i],
        color: COLORS[i],
      }));
      series.push({
        x: column(runs[0], "t"),
        y: column(runs[0], "v_d"),
        label: "desired",
        color: "#555555",
        dash: "6 4",
      });
      return series;
    },
  },
  tracking_error: {
    required: ["t", "x1"],
    title: "Speed-tracking error over the cycle",
    yLabel: "speed error x1 [m/s]",
    build: (runs, labels) =>
      runs.map((r, i) => ({
        x: column(r, "t"),
        y: column(r, "x1"),
        label: labels[i],
        color: COLORS[i],
      })),
  },
  power: {
    required: ["t", "p_batt"],
    title: "Net traction power over the cycle",
    yLabel: "net traction power [W]",
    build: (runs, labels) =>
      runs.map((r, i) => ({
        x: column(r, "t"),
        y: column(r, "p_batt"),
        label: labels[i],
        color: COLORS[i],
      })),
  },
};

export function plot(spec: PlotSpec): void {
  if (spec.inputs.length < 1 || spec.inputs.length > 2) {
    throw new Error("plot takes one or two input runs");
  }
  const def = FIGURES[spec.kind];
  if (!def) {
    throw new Error(`unknown figure kind "${spec.kind}"`);
  }
  const runs = spec.inputs.map((p) => readTrajectory(p, def.required));
  const labels = spec.inputs.map(
    (p, i) => spec.labels?.[i] ?? basename(p).replace(/\.csv$/, ""),
  );
  const svg = lineChart(def.build(runs, labels), {
    title: def.title,
    xLabel: "time [s]",
    yLabel: def.yLabel,
  });
  writeFileSync(spec.output, svg);
}

export function parseArgs(argv: string[]): PlotSpec {
  let kind: string | undefined;
  const inputs: string[] = [];
  const labels: string[] = [];
  let output: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`${a} needs a value`);
      return argv[i];
    };
    switch (a) {
      case "--kind": kind = next(); break;
      case "--input": inputs[0] = next(); break;
      case "--input2": inputs[1] = next(); break;
      case "--label": labels[0] = next(); break;
      case "--label2": labels[1] = next(); break;
      case "--out": output = next(); break;
      default: throw new Error(`unknown flag ${a}`);
    }
  }
  if (!kind || !(kind in FIGURES)) {
    throw new Error(`--kind must be one of ${Object.keys(FIGURES).join(", ")}`);
  }
  if (inputs.length === 0 || inputs[0] === undefined) {
    throw new Error("--input is required");
  }
  if (!output) {
    throw new Error("--out is required");
  }
  return {
    kind: kind as FigureKind,
    inputs: inputs.filter((p): p is string => p !== undefined),
    output,
    labels: labels.length ? labels : undefined,
  };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    plot(spec);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
