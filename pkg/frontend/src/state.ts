/**
 * Overlay selection state machine.
 *
 * Exactly one layer is active at any time and the opacity is a single
 * shared value bound to the slider. Mouse hover, touch taps, and swipe
 * gestures all funnel into the same two transitions (select / cycle), so
 * the pointer and touch UIs cannot drift apart.
 */

export const LAYER_IDS = [
  "original",
  "segmentation",
  "globules",
  "streaks",
  "pigment_network",
  "milia_like_cyst",
  "negative_network",
  "abcd-colors",
  "asymmetry",
  "rise-heatmap",
] as const;

export type LayerId = (typeof LAYER_IDS)[number];

export interface OverlaySelection {
  activeLayer: LayerId;
  opacity: number;
}

export type SelectionListener = (selection: OverlaySelection) => void;

export class OverlayStore {
  private active: LayerId = "original";
  private opacityValue = 0.8;
  private available = new Set<LayerId>(["original"]);
  private listeners: SelectionListener[] = [];

  get selection(): OverlaySelection {
    return { activeLayer: this.active, opacity: this.opacityValue };
  }

  get availableLayers(): LayerId[] {
    return LAYER_IDS.filter((id) => this.available.has(id));
  }

  subscribe(listener: SelectionListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.selection);
  }

  /** A layer becomes selectable once its content has arrived. */
  enableLayer(id: LayerId): void {
    this.available.add(id);
    this.emit();
  }

  disableLayer(id: LayerId): void {
    if (id === "original") return;
    this.available.delete(id);
    if (this.active === id) this.active = "original";
    this.emit();
  }

  /** Pointer hover, touch tap, and programmatic selection all land here. */
  selectLayer(id: LayerId): void {
    if (!this.available.has(id) || this.active === id) return;
    this.active = id;
    this.emit();
  }

  /** Swipe gestures step through the available layers in display order. */
  cycleLayer(direction: 1 | -1): void {
    const layers = this.availableLayers;
    const index = layers.indexOf(this.active);
    const next = layers[(index + direction + layers.length) % layers.length];
    this.selectLayer(next);
  }

  setOpacity(value: number): void {
    const clamped = Math.min(1, Math.max(0, value));
    if (clamped === this.opacityValue) return;
    this.opacityValue = clamped;
    this.emit();
  }

  reset(): void {
    this.active = "original";
    this.available = new Set<LayerId>(["original"]);
    this.emit();
  }
}
