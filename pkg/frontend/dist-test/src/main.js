/** App shell: hash routing between the decision-support page and the
 * evaluation dashboard; one responsive layout covers pointer and touch. */
import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { ClassificationView } from "./views/classification.js";
import { EvaluationView } from "./views/evaluation.js";
function route() {
    return location.hash === "#/evaluate" ? "evaluate" : "classify";
}
function start() {
    const api = new ApiClient("");
    const classification = new ClassificationView(api);
    const evaluation = new EvaluationView(api);
    const outlet = el("main", { class: "outlet" });
    const tabs = el("nav", { class: "tabs" }, el("a", { href: "#/classify", "data-route": "classify" }, "Analysis"), el("a", { href: "#/evaluate", "data-route": "evaluate" }, "Evaluation"));
    const render = () => {
        const current = route();
        clear(outlet);
        outlet.append(current === "classify" ? classification.root : evaluation.root);
        for (const link of tabs.querySelectorAll("a")) {
            link.classList.toggle("active", link.getAttribute("data-route") === current);
        }
    };
    window.addEventListener("hashchange", render);
    document.body.append(el("header", { class: "topbar" }, el("h1", {}, "Lesion analysis"), tabs), outlet);
    render();
}
start();
