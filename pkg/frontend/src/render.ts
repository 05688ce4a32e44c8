import { outcomeLetters, pendingEntry, type ConsoleState } from "./state.js";
import type { ParentNode, Recommendation, SessionView } from "./types.js";

/**
 * Pure HTML renderers. Every number that reaches the page is a string
 * taken verbatim from an API payload (weight display/percent strings,
 * the answered/total counters); nothing numeric is computed here.
 */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function banner(state: ConsoleState): string {
  if (state.banner === null) return "";
  return `<div class="banner" role="alert">${escapeHtml(state.banner)}
    <button data-action="retry">retry</button></div>`;
}

function notice(state: ConsoleState): string {
  if (state.notice === null) return "";
  return `<p class="notice">${escapeHtml(state.notice)}</p>`;
}

function conceptRow(parent: ParentNode, busy: boolean): string {
  const prereqs = parent.prerequisites.length
    ? `<span class="badge">prereqs: ${escapeHtml(parent.prerequisites.join(", "))}</span>`
    : `<span class="badge badge-none">no prerequisites</span>`;
  return `<li>
    <button data-action="pick" data-parent="${escapeHtml(parent.id)}"${busy ? " disabled" : ""}>
      ${escapeHtml(parent.id)}
    </button>
    ${prereqs}
  </li>`;
}

export function renderPicker(state: ConsoleState): string {
  const graph = state.graph;
  const list = graph
    ? `<ul class="concepts">${graph.parents
        .map((parent) => conceptRow(parent, state.busy))
        .join("\n")}</ul>`
    : `<p class="loading">loading concepts...</p>`;
  return `<section class="picker">
    <h2>Choose a concept to study</h2>
    <label class="mode">mode
      <select id="mode">
        <option value="prerequisite" selected>assess prerequisites first</option>
        <option value="direct">assess this concept directly</option>
      </select>
    </label>
    ${list}
  </section>`;
}

function chips(session: SessionView): string {
  const letters = outcomeLetters(session)
    .map((letter) => {
      if (letter === null) return `<span class="chip chip-open"></span>`;
      const cls = letter === "P" ? "chip-pass" : "chip-fail";
      return `<span class="chip ${cls}">${letter}</span>`;
    })
    .join("");
  return `<p class="progress">${letters}
    <span class="count">${session.answered} of ${session.total} answered</span></p>`;
}

function gradeLine(state: ConsoleState): string {
  const grade = state.lastGrade;
  if (!grade) return "";
  const marks = grade.correct.map((ok) => (ok ? "&#10003;" : "&#10007;")).join(" ");
  const cls = grade.outcome === "Pass" ? "grade-pass" : "grade-fail";
  return `<p class="grade ${cls}">${escapeHtml(grade.leaf)}: ${grade.outcome} ${marks}</p>`;
}

export function renderQuiz(state: ConsoleState): string {
  const session = state.session;
  if (!session) return `<p class="loading">no session</p>`;
  const entry = pendingEntry(session);
  if (!entry) return `<p class="loading">finalizing...</p>`;
  const items = state.quizzes[entry.leaf];
  const form = items
    ? `<form data-action="quiz-form">
        ${items
          .map(
            (item, index) => `<fieldset>
          <legend>${escapeHtml(item.prompt)}</legend>
          ${item.choices
            .map(
              (choice, choiceIndex) => `<label class="choice">
            <input type="radio" name="item-${index}" value="${choiceIndex}" required>
            ${escapeHtml(choice)}
          </label>`,
            )
            .join("\n")}
        </fieldset>`,
          )
          .join("\n")}
        <button type="submit"${state.busy ? " disabled" : ""}>submit answer</button>
      </form>`
    : `<p class="banner">no quiz content for ${escapeHtml(entry.leaf)}</p>`;
  return `<section class="quiz">
    ${chips(session)}
    ${gradeLine(state)}
    <h2><span class="parent">${escapeHtml(entry.parent)}</span> ${escapeHtml(entry.leaf)}</h2>
    ${form}
  </section>`;
}

function renderRecommendation(recommendation: Recommendation): string {
  if (recommendation.kind === "progress") {
    const headline = recommendation.curriculum_complete
      ? `<p class="verdict">Curriculum complete. Nothing left to assess.</p>`
      : `<p class="verdict">Progress to: <strong>${escapeHtml(recommendation.target ?? "")}</strong></p>`;
    return `<h2>All clear</h2>${headline}`;
  }
  const leaves = recommendation.leaves
    .map((leaf) => `<li class="relearn-leaf">${escapeHtml(leaf)}</li>`)
    .join("\n");
  const rows = recommendation.per_parent
    .map(
      ({ parent, weight }) => `<div class="bar-row">
      <span class="bar-label">${escapeHtml(parent)}</span>
      <span class="bar"><span class="bar-fill" style="width: ${escapeHtml(weight.percent)}"></span></span>
      <span class="bar-value">${escapeHtml(weight.display)} (${escapeHtml(weight.percent)})</span>
      <button data-action="reassess" data-parent="${escapeHtml(parent)}">re-assess ${escapeHtml(parent)}</button>
    </div>`,
    )
    .join("\n");
  return `<h2>Relearn before continuing</h2>
    <p class="verdict">missing-skill weight:
      <strong>${escapeHtml(recommendation.weight.display)}</strong>
      (${escapeHtml(recommendation.weight.percent)})</p>
    <ul class="relearn">${leaves}</ul>
    <h3>by concept</h3>
    <div class="bars">${rows}</div>`;
}

export function renderSummary(state: ConsoleState): string {
  const session = state.session;
  const body = state.recommendation
    ? renderRecommendation(state.recommendation)
    : `<p class="loading">computing recommendation...</p>`;
  const heading = session
    ? `<p class="session-line">assessed for <strong>${escapeHtml(session.desired)}</strong>
        (${escapeHtml(session.mode)} mode)</p>`
    : "";
  return `<section class="summary">
    ${heading}
    ${session ? chips(session) : ""}
    ${body}
    <p><button data-action="home">choose another concept</button></p>
  </section>`;
}

export function renderPage(state: ConsoleState): string {
  const view = {
    "concept-picker": renderPicker,
    quiz: renderQuiz,
    summary: renderSummary,
  }[state.view](state);
  return `<header><h1>pre-assessment console</h1></header>
    ${banner(state)}
    ${notice(state)}
    <main>${view}</main>`;
}
