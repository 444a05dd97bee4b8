// Zod schemas for the annotation service's request and response
// documents.  Every outbound request is validated before it leaves the
// client; responses are parsed strictly so a payload that leaked
// another annotator's labels would be rejected instead of displayed.

import { z } from "zod";

export const CreateSessionRequestSchema = z
  .object({
    sentences: z.array(z.array(z.string().min(1)).nonempty()).nonempty(),
    annotators: z.array(z.string().min(1)).nonempty(),
    tagset: z.array(z.string().min(1)).nullable().optional(),
    model_path: z.string().nullable().optional(),
    source_ids: z.array(z.string()).nullable().optional(),
  })
  .strict();
export type CreateSessionRequest = z.infer<typeof CreateSessionRequestSchema>;

export const CreateSessionResponseSchema = z
  .object({ session_id: z.string().min(1) })
  .strict();

export const ItemPayloadSchema = z
  .object({
    done: z.literal(false),
    item_id: z.number().int().nonnegative(),
    tokens: z.array(z.string()).nonempty(),
    pre_annotations: z.array(z.string()).nullable(),
    tagset: z.array(z.string()).nonempty(),
  })
  .strict();
export type ItemPayload = z.infer<typeof ItemPayloadSchema>;

export const NextItemResponseSchema = z.union([
  z.object({ done: z.literal(true) }).strict(),
  ItemPayloadSchema,
]);
export type NextItemResponse = z.infer<typeof NextItemResponseSchema>;

export const SubmitLabelsRequestSchema = z
  .object({
    annotator: z.string().min(1),
    tags: z.array(z.string().min(1)).nonempty(),
    mae_equivalents: z.array(z.string()).nullable().optional(),
  })
  .strict();
export type SubmitLabelsRequest = z.infer<typeof SubmitLabelsRequestSchema>;

export const SubmitLabelsResponseSchema = z
  .object({ accepted: z.boolean(), alpha: z.number().nullable() })
  .strict();
export type SubmitLabelsResponse = z.infer<typeof SubmitLabelsResponseSchema>;

export const AgreementResponseSchema = z
  .object({ alpha: z.number().nullable() })
  .strict();

export const TieSchema = z
  .object({
    item: z.number().int().nonnegative(),
    position: z.number().int().nonnegative(),
    candidates: z.array(z.string()),
  })
  .strict();

export const MajorityExportSchema = z
  .object({
    strategy: z.literal("majority_vote"),
    conll: z.string(),
    ties: z.array(TieSchema),
  })
  .strict();
export type MajorityExport = z.infer<typeof MajorityExportSchema>;

export const PerAnnotatorExportSchema = z
  .object({
    strategy: z.literal("per_annotator"),
    annotators: z.record(z.string()),
    item_ids: z.record(z.array(z.number().int().nonnegative())),
  })
  .strict();
export type PerAnnotatorExport = z.infer<typeof PerAnnotatorExportSchema>;

export const SessionSummarySchema = z
  .object({
    session_id: z.string(),
    items: z.number().int().nonnegative(),
    annotators: z.array(
      z
        .object({
          id: z.string(),
          completed: z.number().int().nonnegative(),
        })
        .strict(),
    ),
    alpha: z.number().nullable(),
  })
  .strict();
export type SessionSummary = z.infer<typeof SessionSummarySchema>;

export const HealthResponseSchema = z
  .object({ status: z.string(), sessions: z.number().int() })
  .strict();

export const ErrorResponseSchema = z.object({ detail: z.string() });
