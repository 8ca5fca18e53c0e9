"""
From RELAX NG to a polynomial equation system
=============================================

A grammar goes through three stages: the XML syntax is parsed and
normalized into a small pattern algebra, element definitions become
combinatorial classes, and each class gets one polynomial equation in
the size variable x.
"""

from boltzxml import compile_grammar, parse_grammar, to_canonical

# a tiny recursive grammar: an entry either stops or nests two entries
SOURCE = b"""<?xml version="1.0" encoding="UTF-8"?>
<grammar xmlns="http://relaxng.org/ns/structure/1.0">
  <start><ref name="entry"/></start>
  <define name="entry">
    <element name="entry">
      <optional>
        <group><ref name="entry"/><ref name="entry"/></group>
      </optional>
    </element>
  </define>
</grammar>
"""

grammar = parse_grammar(SOURCE, source="inline")

# the normalized pattern tree, in the canonical text form the compiler
# and the tooling share; optional has already become a choice with empty
print("canonical pattern form")
print("----------------------")
print(to_canonical(grammar))

# each element define turns into a class; every element and attribute
# contributes one factor of x, so the equation below reads
# entry = x + x * entry^2
system = compile_grammar(grammar)
header = "equation system (start class %r)" % system.start
print(header)
print("-" * len(header))
for name in system.classes:
    terms = []
    for mon in system.equations[name]:
        factors = []
        if mon.coeff != 1:
            factors.append(str(mon.coeff))
        if mon.xexp:
            factors.append("x" if mon.xexp == 1 else "x^%d" % mon.xexp)
        for cls, exp in mon.powers:
            factors.append(cls if exp == 1 else "%s^%d" % (cls, exp))
        terms.append(" * ".join(factors) or "1")
    print("  %s = %s" % (name, "  +  ".join(terms)))
