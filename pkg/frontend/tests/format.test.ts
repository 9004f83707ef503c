import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  SchemaViolation, countNodes, parseJsonDocument, parseWitness,
  parseXmlDocument, serializeJson, serializeXml,
} from "../src/tlaceFormat.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

describe("projection faithfulness on the bundled exports", () => {
  const jsonFixtures = [
    "cryptographers.tlace.json",
    "primality.tlace.json",
    "nested-knowledge.tlace.json",
  ];
  for (const name of jsonFixtures) {
    it(`re-serializes ${name} canonically`, () => {
      const text = fixture(name);
      expect(serializeJson(parseJsonDocument(text))).toBe(text);
    });
  }

  it("re-serializes cryptographers.tlace.xml canonically", () => {
    const text = fixture("cryptographers.tlace.xml");
    expect(serializeXml(parseXmlDocument(text))).toBe(text);
  });

  it("XML and JSON exports describe the same witness", () => {
    const fromXml = parseXmlDocument(fixture("cryptographers.tlace.xml"));
    const fromJson = parseJsonDocument(fixture("cryptographers.tlace.json"));
    expect(serializeJson(fromXml)).toBe(serializeJson(fromJson));
  });

  it("sniffs the format", () => {
    expect(countNodes(parseWitness(fixture("cryptographers.tlace.xml"))))
      .toBe(countNodes(parseWitness(fixture("cryptographers.tlace.json"))));
  });
});

describe("schema violations carry element paths", () => {
  it("rejects missing state attributes", () => {
    const text = fixture("cryptographers.tlace.xml")
      .replace(' state="init_none"', "");
    expect(() => parseXmlDocument(text)).toThrow(SchemaViolation);
    try {
      parseXmlDocument(text);
    } catch (error) {
      expect((error as SchemaViolation).path).toContain("tlace/node");
      expect((error as SchemaViolation).message).toContain("state");
    }
  });

  it("rejects contradictory truncated flags", () => {
    const text = fixture("cryptographers.tlace.json")
      .replace('"truncated": false', '"truncated": true');
    expect(() => parseJsonDocument(text)).toThrow(/truncated/);
  });

  it("rejects unknown keys with a path", () => {
    const text = fixture("cryptographers.tlace.json")
      .replace('"state"', '"status"');
    expect(() => parseJsonDocument(text)).toThrow(/keys must be exactly/);
  });

  it("rejects non-alternating paths", () => {
    const bad = `<?xml version="1.0" encoding="UTF-8"?>
<tlace version="1">
  <node state="s0" truncated="false">
    <atomics />
    <universals />
    <branch formula="E&lt;u&gt;X p">
      <path>
        <action id="a" />
        <node state="s0" truncated="false"><atomics /><universals /></node>
      </path>
    </branch>
  </node>
</tlace>
`;
    expect(() => parseXmlDocument(bad)).toThrow(/action without a preceding node/);
  });

  it("reports bad JSON as a schema violation", () => {
    expect(() => parseJsonDocument("MODULE main")).toThrow(/not valid JSON/);
  });
});
