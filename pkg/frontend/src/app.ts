// Browser wiring: socket, view model, canvas rendering, control panel.
// Rendering runs on the display refresh clock, decoupled from message arrival.

import { activationPolylines, phasePolylines, Polyline } from "./charts.js";
import { claimControl, ControlEvent, dispatchControl, releaseControl } from "./controls.js";
import { buildGraphView } from "./graphview.js";
import { SessionViewModel, WINDOW_SECONDS } from "./model.js";
import { CueValue, MessageEncoder, parseServerMessage } from "./protocol.js";

const CUES: CueValue[] = ["none", "left_extended", "right_extended", "both_extended", "disengaged"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function wsUrl(): string {
  const override = new URLSearchParams(location.search).get("ws");
  if (override) return override;
  return "ws://127.0.0.1:8765";
}

class App {
  model = new SessionViewModel();
  encoder = new MessageEncoder();
  socket: WebSocket | null = null;
  slidersBuilt = false;

  graphCanvas = el<HTMLCanvasElement>("graph");
  lambdaCanvas = el<HTMLCanvasElement>("lambda-chart");
  phiCanvas = el<HTMLCanvasElement>("phi-chart");
  banner = el<HTMLDivElement>("banner");
  roleBadge = el<HTMLSpanElement>("role");
  controls = el<HTMLDivElement>("controls");
  sliderBox = el<HTMLDivElement>("sliders");
  errorBox = el<HTMLDivElement>("errors");

  start(): void {
    this.connect();
    this.buildStaticControls();
    const frame = () => {
      this.render();
      requestAnimationFrame(frame);
    };
    requestAnimationFrame(frame);
  }

  connect(): void {
    const socket = new WebSocket(wsUrl());
    this.socket = socket;
    socket.addEventListener("open", () => this.model.onOpen());
    socket.addEventListener("close", () => {
      this.model.onClose();
      setTimeout(() => this.connect(), 1000);
    });
    socket.addEventListener("message", (event) => {
      try {
        this.model.onMessage(parseServerMessage(String(event.data)), performance.now());
      } catch (err) {
        console.warn("bad frame", err);
      }
      if (this.model.graph && !this.slidersBuilt) this.buildSliders();
    });
  }

  send(event: ControlEvent): void {
    const out = dispatchControl(event, this.model.role, this.encoder);
    if (out && this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(out.frame);
    }
  }

  buildStaticControls(): void {
    const claim = el<HTMLButtonElement>("claim");
    claim.addEventListener("click", () => {
      if (!this.socket) return;
      const out = this.model.role === "controller"
        ? releaseControl(this.encoder)
        : claimControl(this.encoder);
      this.socket.send(out.frame);
    });
    for (const cue of CUES) {
      const button = document.createElement("button");
      button.textContent = cue.replace("_", " ");
      button.className = "cue";
      button.addEventListener("click", () => this.send({ kind: "cue", value: cue }));
      el<HTMLDivElement>("cues").appendChild(button);
    }
    el<HTMLButtonElement>("pause").addEventListener("click", () => this.send({ kind: "pause" }));
    el<HTMLButtonElement>("resume").addEventListener("click", () => this.send({ kind: "resume" }));
    el<HTMLButtonElement>("reset").addEventListener("click", () => this.send({ kind: "reset", seed: 0 }));
  }

  buildSliders(): void {
    const graph = this.model.graph!;
    this.slidersBuilt = true;
    graph.states.forEach((name, k) => {
      const row = document.createElement("label");
      row.className = "slider-row";
      const caption = document.createElement("span");
      caption.textContent = `g[${name}]`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "-2";
      slider.max = "8";
      slider.step = "0.1";
      slider.value = "1";
      slider.dataset.state = String(k);
      const value = document.createElement("span");
      value.textContent = "1.0";
      slider.addEventListener("change", () => {
        const sliders = this.sliderBox.querySelectorAll<HTMLInputElement>("input[type=range]");
        const g = Array.from(sliders).map((s) => Number(s.value));
        this.send({ kind: "greediness", values: g });
      });
      slider.addEventListener("input", () => {
        value.textContent = Number(slider.value).toFixed(1);
      });
      row.append(caption, slider, value);
      this.sliderBox.appendChild(row);
    });
  }

  syncSliders(): void {
    // no optimistic UI: sliders follow the server-acknowledged values
    const g = this.model.latest?.g;
    if (!g) return;
    const sliders = this.sliderBox.querySelectorAll<HTMLInputElement>("input[type=range]");
    sliders.forEach((slider, k) => {
      if (document.activeElement !== slider && k < g.length) {
        slider.value = String(g[k]);
        const label = slider.nextElementSibling as HTMLSpanElement | null;
        if (label) label.textContent = g[k].toFixed(1);
      }
    });
  }

  drawPolylines(canvas: HTMLCanvasElement, lines: Polyline[], yLabel: string): void {
    const ctx = canvas.getContext("2d")!;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.strokeStyle = "#ddd";
    ctx.strokeRect(0.5, 0.5, canvas.width - 1, canvas.height - 1);
    ctx.fillStyle = "#888";
    ctx.font = "11px sans-serif";
    ctx.fillText(yLabel, 6, 14);
    for (const line of lines) {
      ctx.strokeStyle = line.color;
      ctx.lineWidth = 1.4;
      ctx.beginPath();
      line.points.forEach((p, k) => (k ? ctx.lineTo(p.x, p.y) : ctx.moveTo(p.x, p.y)));
      ctx.stroke();
    }
  }

  render(): void {
    const stale = this.model.isStale(performance.now());
    this.banner.hidden = !stale;
    this.banner.textContent = this.model.connection === "open"
      ? "stream stalled (no data for 2 s)" : "disconnected, retrying…";
    this.roleBadge.textContent = this.model.role;
    this.roleBadge.className = this.model.role;
    this.controls.classList.toggle("disabled", this.model.role !== "controller");
    this.controls.title = this.model.role === "controller"
      ? "" : "observer mode: claim control to steer";

    const graph = this.model.graph;
    if (!graph) return;
    const view = buildGraphView(graph, this.model.latest,
      this.graphCanvas.width, this.graphCanvas.height);
    const ctx = this.graphCanvas.getContext("2d")!;
    ctx.clearRect(0, 0, this.graphCanvas.width, this.graphCanvas.height);
    for (const edge of view.edges) {
      ctx.strokeStyle = "#666";
      ctx.lineWidth = edge.width;
      ctx.globalAlpha = 0.25 + 0.75 * Math.min(1, edge.weight);
      ctx.beginPath();
      ctx.moveTo(edge.x1, edge.y1);
      ctx.lineTo(edge.x2, edge.y2);
      ctx.stroke();
      if (edge.marker) {
        ctx.globalAlpha = 1;
        ctx.fillStyle = "#e45756";
        ctx.beginPath();
        ctx.arc(edge.marker.x, edge.marker.y, 5, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
    ctx.globalAlpha = 1;
    for (const node of view.nodes) {
      ctx.beginPath();
      ctx.arc(node.x, node.y, 16, 0, 2 * Math.PI);
      ctx.fillStyle = `rgba(76, 120, 168, ${0.15 + 0.85 * node.opacity})`;
      ctx.fill();
      ctx.strokeStyle = node.dominant ? "#222" : "#999";
      ctx.lineWidth = node.dominant ? 2.5 : 1;
      ctx.stroke();
      ctx.fillStyle = "#222";
      ctx.font = "11px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(node.name, node.x, node.y - 22);
    }

    this.drawPolylines(this.lambdaCanvas,
      activationPolylines(this.model.window, graph.states, graph.edges,
        this.lambdaCanvas.width, this.lambdaCanvas.height, WINDOW_SECONDS),
      "activation Λ");
    this.drawPolylines(this.phiCanvas,
      phasePolylines(this.model.window, graph.states, graph.edges,
        this.phiCanvas.width, this.phiCanvas.height, WINDOW_SECONDS),
      "phase Φ");

    this.syncSliders();
    this.errorBox.textContent = this.model.errors.slice(-3)
      .map((e) => `${e.code}: ${e.detail}`).join("\n");
  }
}

window.addEventListener("load", () => new App().start());
