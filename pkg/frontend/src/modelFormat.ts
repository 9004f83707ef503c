/**
 * Optional side-channel: the model document the witness was produced from.
 * Supplies per-state variable assignments for the inspector panel and the
 * action labelings that drive edge styling.
 */

export type VariableValue = boolean | number | string;

export interface ModelInfo {
  stateVariables: Record<string, Record<string, VariableValue>>;
  actionAtoms: Record<string, string[]>;
}

export class ModelFormatViolation extends Error {}

export function parseModelDocument(text: string): ModelInfo {
  let document: unknown;
  try {
    document = JSON.parse(text);
  } catch (error) {
    throw new ModelFormatViolation(`not valid JSON: ${(error as Error).message}`);
  }
  if (typeof document !== "object" || document === null) {
    throw new ModelFormatViolation("model document must be a JSON object");
  }
  const doc = document as Record<string, unknown>;
  if (doc.format !== 1) {
    throw new ModelFormatViolation("missing or unsupported format version");
  }
  const states = doc.states;
  if (typeof states !== "object" || states === null) {
    throw new ModelFormatViolation("missing 'states' section");
  }
  const stateVariables: Record<string, Record<string, VariableValue>> = {};
  for (const [id, assignment] of Object.entries(states)) {
    if (typeof assignment !== "object" || assignment === null) {
      throw new ModelFormatViolation(`state ${id} must map to an assignment`);
    }
    stateVariables[id] = assignment as Record<string, VariableValue>;
  }
  // Boolean action variables double as atoms; that is all edge styling needs.
  const actionAtoms: Record<string, string[]> = {};
  const actions = doc.actions;
  if (typeof actions === "object" && actions !== null) {
    for (const [id, assignment] of Object.entries(actions)) {
      const atoms: string[] = [];
      for (const [name, value] of Object.entries(
          assignment as Record<string, VariableValue>)) {
        if (value === true) atoms.push(name);
      }
      actionAtoms[id] = atoms.sort();
    }
  }
  return { stateVariables, actionAtoms };
}
