"""
The JSON input document (format 1): parsing with located errors,
normalisation, and a canonical serialisation.

Layout (all tensors sparse, entries ``[i, j, ..., coefficient]``;
rational coefficients are strings "p/q", prime field coefficients are
integers):

    {"format": 1, "name": ..., "field": "Q" | "GF(p)",
     "hopf": {"basis": [...], "mul", "unit", "coproduct", "counit",
              "antipode", "alpha", "beta", "associator", "R",
              "associator_inverse"?, "flags": {"triangular": bool}},
     "modules":   [{"name", "degrees", "labels"?, "action"}],
     "algebras":  [{"name", "module", "product", "unit"}],
     "bimodules": [{"name", "algebra", "regular": true}
                   | {"name", "algebra", "module", "left", "right"?}],
     "calculus":  {"algebra", "D"},
     "twist":     {"F", "F_inverse"?},
     "frames":    [{"bimodule", "vectors": [sparse, ...]}],
     "probes":    [module names]}

Tensor layouts follow the library: mul[i,j,k] is the coefficient of e_k in
e_i e_j, coproduct[i,j,k] of e_j (x) e_k in Delta(e_i), action[h,x,y] is the
matrix of e_h, product[i,j,k] of a_k in a_i a_j, left[i,j,k] of v_k in
a_i v_j, right[j,i,k] of v_k in v_j a_i, D[x,y] the matrix of d.
"""

import json
import json.decoder
import json.scanner

from ..exactcore import field_from_name


class SpecError(Exception):
    """Input error with a location (line, column, path)."""

    kind = "SpecError"

    def __init__(self, msg, path="$", line=None, col=None):
        self.msg, self.path, self.line, self.col = msg, path, line, col
        loc = "" if line is None else " (line %d, column %d)" % (line, col)
        Exception.__init__(self, "%s at %s%s: %s" % (self.kind, path, loc, msg))


class SpecSyntaxError(SpecError):
    kind = "SyntaxError"


class UnknownField(SpecError):
    kind = "UnknownField"


class RangeError(SpecError):
    kind = "RangeError"


# ---------------------------------------------------------------------------
# a JSON decoder that remembers where containers start

class _Dict(dict):
    pos = None


class _List(list):
    pos = None


class _LocatingDecoder(json.JSONDecoder):
    def __init__(self):
        json.JSONDecoder.__init__(self)
        base_obj, base_arr = self.parse_object, self.parse_array

        def parse_object(s_and_end, *args):
            start = s_and_end[1] - 1
            obj, end = base_obj(s_and_end, *args)
            out = _Dict(obj)
            out.pos = start
            return out, end

        def parse_array(s_and_end, *args):
            start = s_and_end[1] - 1
            arr, end = base_arr(s_and_end, *args)
            out = _List(arr)
            out.pos = start
            return out, end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.scan_once = json.scanner.py_make_scanner(self)


def _line_col(text, pos):
    if pos is None:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


# ---------------------------------------------------------------------------
# the document

TOP_KEYS = {"format", "name", "field", "hopf", "modules", "algebras", "bimodules",
            "calculus", "twist", "frames", "probes", "description"}
HOPF_KEYS = {"basis", "mul", "unit", "coproduct", "counit", "antipode", "alpha", "beta",
             "associator", "associator_inverse", "R", "flags"}
HOPF_REQUIRED = HOPF_KEYS - {"associator_inverse", "flags"}
MODULE_KEYS = {"name", "degrees", "labels", "action"}
ALGEBRA_KEYS = {"name", "module", "product", "unit"}
BIMODULE_KEYS = {"name", "algebra", "module", "regular", "left", "right"}
CALCULUS_KEYS = {"algebra", "D"}
TWIST_KEYS = {"F", "F_inverse"}
FRAME_KEYS = {"bimodule", "vectors"}
FLAG_KEYS = {"triangular"}


class SpecDocument(object):
    """A structurally validated document.  ``data`` holds plain JSON values;
    sparse tensors are kept as parsed {index tuple: field element} dicts in
    ``tensors`` keyed by their path."""

    def __init__(self, data, field, tensors, text=None):
        self.data = data
        self.field = field
        self.tensors = tensors
        self.text = text

    @property
    def name(self):
        return self.data.get("name", "document")

    def tensor(self, path):
        return self.tensors[path]

    def to_json(self):
        return dump_document(self)

    def __repr__(self):
        return "SpecDocument(%s over %s)" % (self.name, self.field)


class _Checker(object):
    def __init__(self, text):
        self.text = text
        self.tensors = {}
        self.field = None

    def err(self, cls, msg, path, node=None):
        line, col = _line_col(self.text, getattr(node, "pos", None))
        raise cls(msg, path, line, col)

    def keys(self, node, allowed, required, path):
        if not isinstance(node, dict):
            self.err(SpecSyntaxError, "expected an object", path, node)
        for k in sorted(node):
            if k not in allowed:
                self.err(UnknownField, "unknown field %r" % k, path + "." + k, node)
        for k in sorted(required):
            if k not in node:
                self.err(SpecSyntaxError, "missing field %r" % k, path, node)

    def int_list(self, node, path):
        if not isinstance(node, list) or not all(isinstance(x, int) and not isinstance(x, bool)
                                                 for x in node):
            self.err(SpecSyntaxError, "expected a list of integers", path, node)
        return list(node)

    def str_list(self, node, path):
        if not isinstance(node, list) or not all(isinstance(x, str) for x in node):
            self.err(SpecSyntaxError, "expected a list of strings", path, node)
        return list(node)

    def coefficient(self, c, path, node):
        try:
            return self.field.parse(c)
        except (ValueError, ZeroDivisionError) as e:
            self.err(RangeError, str(e), path, node)

    def sparse(self, node, shape, path):
        if not isinstance(node, list):
            self.err(SpecSyntaxError, "expected a list of sparse entries", path, node)
        out = {}
        for e, entry in enumerate(node):
            p = "%s[%d]" % (path, e)
            if not isinstance(entry, list) or len(entry) != len(shape) + 1:
                self.err(SpecSyntaxError, "expected [%s coefficient]"
                         % "".join("i%d, " % k for k in range(len(shape))), p, entry)
            idx = entry[:-1]
            for k, (i, n) in enumerate(zip(idx, shape)):
                if not isinstance(i, int) or isinstance(i, bool):
                    self.err(SpecSyntaxError, "index must be an integer", "%s[%d]" % (p, k), entry)
                if not 0 <= i < n:
                    self.err(RangeError, "index %d out of range 0..%d" % (i, n - 1),
                             "%s[%d]" % (p, k), entry)
            key = tuple(idx)
            if key in out:
                self.err(RangeError, "repeated index %s" % (key,), p, entry)
            c = self.coefficient(entry[-1], "%s[%d]" % (p, len(shape)), entry)
            if c != 0:
                out[key] = c
        self.tensors[path] = (tuple(shape), out)
        return out


def parse_spec(raw):
    """Parse bytes or text into a SpecDocument (structural checks only)."""
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SpecSyntaxError("input is not UTF-8 (%s)" % e.reason, "$")
    else:
        text = raw
    try:
        data = _LocatingDecoder().decode(text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(e.msg, "$", e.lineno, e.colno)
    c = _Checker(text)
    c.keys(data, TOP_KEYS, {"format", "field"}, "$")
    if data["format"] != 1:
        c.err(RangeError, "unsupported format %r" % (data["format"],), "$.format", data)
    try:
        c.field = field_from_name(data["field"])
    except ValueError as e:
        c.err(RangeError, str(e), "$.field", data)
    n = 1
    if "hopf" in data:
        h = data["hopf"]
        c.keys(h, HOPF_KEYS, HOPF_REQUIRED, "$.hopf")
        labels = c.str_list(h["basis"], "$.hopf.basis")
        n = len(labels)
        if n == 0:
            c.err(RangeError, "empty basis", "$.hopf.basis", h)
        shapes = {"mul": (n, n, n), "unit": (n,), "coproduct": (n, n, n), "counit": (n,),
                  "antipode": (n, n), "alpha": (n,), "beta": (n,), "associator": (n, n, n),
                  "associator_inverse": (n, n, n), "R": (n, n)}
        for k in sorted(shapes):
            if k in h:
                c.sparse(h[k], shapes[k], "$.hopf." + k)
        if "flags" in h:
            c.keys(h["flags"], FLAG_KEYS, set(), "$.hopf.flags")
            for k, v in h["flags"].items():
                if not isinstance(v, bool):
                    c.err(SpecSyntaxError, "flag must be true or false", "$.hopf.flags." + k,
                          h["flags"])
    mods = {}
    for i, m in enumerate(data.get("modules", [])):
        p = "$.modules[%d]" % i
        c.keys(m, MODULE_KEYS, {"name", "degrees", "action"}, p)
        degs = c.int_list(m["degrees"], p + ".degrees")
        if "labels" in m:
            labs = c.str_list(m["labels"], p + ".labels")
            if len(labs) != len(degs):
                c.err(RangeError, "%d labels for %d basis vectors" % (len(labs), len(degs)),
                      p + ".labels", m)
        if m["name"] in mods:
            c.err(RangeError, "duplicate module name %r" % m["name"], p + ".name", m)
        d = len(degs)
        c.sparse(m["action"], (n, d, d), p + ".action")
        mods[m["name"]] = d

    def ref(table, name, path, node, what):
        if name not in table:
            c.err(RangeError, "unknown %s %r" % (what, name), path, node)
        return table[name]

    algs = {}
    for i, a in enumerate(data.get("algebras", [])):
        p = "$.algebras[%d]" % i
        c.keys(a, ALGEBRA_KEYS, ALGEBRA_KEYS, p)
        d = ref(mods, a["module"], p + ".module", a, "module")
        c.sparse(a["product"], (d, d, d), p + ".product")
        c.sparse(a["unit"], (d,), p + ".unit")
        algs[a["name"]] = d
    bims = {}
    for i, b in enumerate(data.get("bimodules", [])):
        p = "$.bimodules[%d]" % i
        c.keys(b, BIMODULE_KEYS, {"name", "algebra"}, p)
        da = ref(algs, b["algebra"], p + ".algebra", b, "algebra")
        if b.get("regular"):
            for k in ("module", "left", "right"):
                if k in b:
                    c.err(UnknownField, "%r is not allowed for a regular bimodule" % k,
                          p + "." + k, b)
            bims[b["name"]] = da
            continue
        for k in ("module", "left"):
            if k not in b:
                c.err(SpecSyntaxError, "missing field %r" % k, p, b)
        d = ref(mods, b["module"], p + ".module", b, "module")
        c.sparse(b["left"], (da, d, d), p + ".left")
        if "right" in b:
            c.sparse(b["right"], (d, da, d), p + ".right")
        bims[b["name"]] = d
    if "calculus" in data:
        cal = data["calculus"]
        c.keys(cal, CALCULUS_KEYS, CALCULUS_KEYS, "$.calculus")
        d = ref(algs, cal["algebra"], "$.calculus.algebra", cal, "algebra")
        c.sparse(cal["D"], (d, d), "$.calculus.D")
    if "twist" in data:
        if "hopf" not in data:
            c.err(RangeError, "a twist needs a hopf block", "$.twist", data["twist"])
        c.keys(data["twist"], TWIST_KEYS, {"F"}, "$.twist")
        for k in ("F", "F_inverse"):
            if k in data["twist"]:
                c.sparse(data["twist"][k], (n, n), "$.twist." + k)
    for i, fr in enumerate(data.get("frames", [])):
        p = "$.frames[%d]" % i
        c.keys(fr, FRAME_KEYS, FRAME_KEYS, p)
        d = ref(bims, fr["bimodule"], p + ".bimodule", fr, "bimodule")
        if not isinstance(fr["vectors"], list):
            c.err(SpecSyntaxError, "expected a list of sparse vectors", p + ".vectors", fr)
        for j, v in enumerate(fr["vectors"]):
            c.sparse(v, (d,), "%s.vectors[%d]" % (p, j))
    for i, nm in enumerate(c.str_list(data.get("probes", []), "$.probes")):
        ref(mods, nm, "$.probes[%d]" % i, data["probes"], "module")
    return SpecDocument(_plain(data), c.field, c.tensors, text)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_plain(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# serialisation

def sparse_entries(F, A):
    """Sorted sparse entries of a dense array, coefficients formatted for F."""
    return [[int(i) for i in idx] + [F.format(c)] for idx, c in sorted(F.nonzero_entries(A))]


def _format_tensor(F, shape_and_data):
    shape, data = shape_and_data
    return [list(idx) + [F.format(c)] for idx, c in sorted(data.items())]


def normalize(doc):
    """Plain JSON value with every sparse tensor rewritten canonically
    (sorted entries, zero entries dropped, canonical coefficients)."""
    data = _plain(doc.data)
    for path, t in doc.tensors.items():
        _set_path(data, path, _format_tensor(doc.field, t))
    return data


def _set_path(data, path, value):
    import re
    parts = re.findall(r"\.([A-Za-z_]+)|\[(\d+)\]", path[1:])
    node = data
    steps = [p[0] if p[0] else int(p[1]) for p in parts]
    for s in steps[:-1]:
        node = node[s]
    node[steps[-1]] = value


def dump_document(doc):
    """Canonical text: sorted keys and sorted sparse entries."""
    return dumps(normalize(doc))


def dumps(value):
    return json.dumps(value, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def convert_field(doc, F):
    """The same document with coefficients mapped into F (rationals reduce
    mod p; anything else must already agree)."""
    if F == doc.field:
        return doc
    data = normalize(doc)
    data["field"] = repr(F)
    for path, (shape, entries) in doc.tensors.items():
        out = []
        for idx, c in sorted(entries.items()):
            if doc.field.char == 0 and F.char:
                den = int(c.denominator)
                if den % F.char == 0:
                    raise RangeError("coefficient %s has no image in %s" % (c, F), path)
                x = int(c.numerator) * pow(den, -1, F.char) % F.char
                out.append(list(idx) + [x])
            elif doc.field.char and F.char == 0:
                out.append(list(idx) + [str(int(c))])
            else:
                raise RangeError("cannot move coefficients from %s to %s" % (doc.field, F), path)
        _set_path(data, path, out)
    return parse_spec(dumps(data))
