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
];
export class OverlayStore {
    constructor() {
        this.active = "original";
        this.opacityValue = 0.8;
        this.available = new Set(["original"]);
        this.listeners = [];
    }
    get selection() {
        return { activeLayer: this.active, opacity: this.opacityValue };
    }
    get availableLayers() {
        return LAYER_IDS.filter((id) => this.available.has(id));
    }
    subscribe(listener) {
        this.listeners.push(listener);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== listener);
        };
    }
    emit() {
        for (const listener of this.listeners)
            listener(this.selection);
    }
    /** A layer becomes selectable once its content has arrived. */
    enableLayer(id) {
        this.available.add(id);
        this.emit();
    }
    disableLayer(id) {
        if (id === "original")
            return;
        this.available.delete(id);
        if (this.active === id)
            this.active = "original";
        this.emit();
    }
    /** Pointer hover, touch tap, and programmatic selection all land here. */
    selectLayer(id) {
        if (!this.available.has(id) || this.active === id)
            return;
        this.active = id;
        this.emit();
    }
    /** Swipe gestures step through the available layers in display order. */
    cycleLayer(direction) {
        const layers = this.availableLayers;
        const index = layers.indexOf(this.active);
        const next = layers[(index + direction + layers.length) % layers.length];
        this.selectLayer(next);
    }
    setOpacity(value) {
        const clamped = Math.min(1, Math.max(0, value));
        if (clamped === this.opacityValue)
            return;
        this.opacityValue = clamped;
        this.emit();
    }
    reset() {
        this.active = "original";
        this.available = new Set(["original"]);
        this.emit();
    }
}
