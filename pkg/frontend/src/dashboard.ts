// Read-only session progress view: per-annotator completion counts and
// the current live agreement value.

import { AnnotationApi } from "./api.js";

export interface AnnotatorProgress {
  id: string;
  completed: number;
  total: number;
  percent: number;
}

export interface DashboardView {
  sessionId: string;
  items: number;
  annotators: AnnotatorProgress[];
  alpha: number | null;
  alphaBadge: string;
}

export function formatAlpha(alpha: number | null): string {
  return alpha === null ? "α n/a" : `α ${alpha.toFixed(3)}`;
}

export async function loadDashboard(
  api: AnnotationApi,
  sessionId: string,
): Promise<DashboardView> {
  const summary = await api.summary(sessionId);
  return {
    sessionId: summary.session_id,
    items: summary.items,
    annotators: summary.annotators.map((a) => ({
      id: a.id,
      completed: a.completed,
      total: summary.items,
      percent: summary.items === 0 ? 0 : (100 * a.completed) / summary.items,
    })),
    alpha: summary.alpha,
    alphaBadge: formatAlpha(summary.alpha),
  };
}
