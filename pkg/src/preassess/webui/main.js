import { ApiClient } from "./api.js";
import { Console } from "./controller.js";
import { renderPage } from "./render.js";
import { parseRoute, routeFor } from "./state.js";
const root = document.getElementById("app");
if (!root)
    throw new Error("missing #app mount point");
const ui = new Console(new ApiClient(""));
// Hash writes triggered by state changes must not bounce back into restore.
let syncingHash = false;
ui.subscribe((state) => {
    root.innerHTML = renderPage(state);
    const route = routeFor(state);
    if (location.hash !== route) {
        syncingHash = true;
        location.hash = route;
    }
});
root.addEventListener("click", (event) => {
    const target = event.target.closest("[data-action]");
    if (!target || target instanceof HTMLFormElement)
        return;
    const action = target.dataset.action;
    if (action === "pick") {
        const mode = document.getElementById("mode")?.value;
        void ui.chooseConcept(target.dataset.parent ?? "", (mode ?? "prerequisite"));
    }
    else if (action === "reassess") {
        void ui.reassess(target.dataset.parent ?? "");
    }
    else if (action === "home") {
        ui.backToPicker();
    }
    else if (action === "retry") {
        void ui.restore(parseRoute(location.hash));
    }
});
root.addEventListener("submit", (event) => {
    const form = event.target;
    if (form.dataset.action !== "quiz-form")
        return;
    event.preventDefault();
    const answers = [];
    form.querySelectorAll("fieldset").forEach((fieldset, index) => {
        const picked = fieldset.querySelector(`input[name="item-${index}"]:checked`);
        if (picked)
            answers.push(parseInt(picked.value, 10));
    });
    if (answers.length === form.querySelectorAll("fieldset").length) {
        void ui.submitAnswers(answers);
    }
});
window.addEventListener("hashchange", () => {
    if (syncingHash) {
        syncingHash = false;
        return;
    }
    void ui.restore(parseRoute(location.hash));
});
void ui.restore(parseRoute(location.hash));
