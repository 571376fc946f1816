"""Random generator of valid dialect documents for property tests.

Every generated document validates cleanly and translates without error
diagnostics (informational notes are allowed).
"""

import random

_WORDS = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
    "hotel", "india", "juliet", "kilo", "lima", "mike", "november",
]


class DocGen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self._serial = 0
        self.numeric_vars: list[str] = []
        self.string_vars: list[str] = []
        self.parts: list[str] = []
        self.db_open = False

    # -- naming -------------------------------------------------------------

    def fresh(self, prefix: str = "v") -> str:
        self._serial += 1
        return f"{prefix}{self._serial}"

    def words(self, low: int = 1, high: int = 4) -> str:
        return " ".join(self.rng.choice(_WORDS) for _ in range(self.rng.randint(low, high)))

    # -- document -----------------------------------------------------------

    def document(self) -> str:
        self._serial = 0
        self.numeric_vars = []
        self.string_vars = []
        self.parts = []
        self.db_open = False
        if self.rng.random() < 0.5:
            self.parts.append('<?xml version="1.0" encoding="UTF-8"?>')
        self.parts.append("<root>")
        if self.rng.random() < 0.7:
            self._declare_block()
        for _ in range(self.rng.randint(2, 8)):
            self._top_item()
        self.parts.append("</root>")
        return "\n".join(self.parts) + "\n"

    def _declare_block(self) -> None:
        self.parts.append("<declare>")
        for _ in range(self.rng.randint(1, 3)):
            if self.rng.random() < 0.75:
                self._var(declare=True)
            else:
                name = self.fresh("arr")
                kind = self.rng.choice(["integer", "real", "string"])
                self.parts.append(f"<array> {kind} {name}[{self.rng.randint(1, 9)}] </array>")
        self.parts.append("</declare>")

    def _var(self, declare: bool = False) -> None:
        name = self.fresh("n" if self.rng.random() < 0.5 else "s")
        roll = self.rng.random()
        if roll < 0.4:
            value = str(self.rng.randint(0, 999))
            self.numeric_vars.append(name)
        elif roll < 0.6:
            value = "%d.%d" % (self.rng.randint(0, 99), self.rng.randint(0, 99))
            self.numeric_vars.append(name)
        else:
            value = '"%s"' % self.words()
            self.string_vars.append(name)
        self.parts.append(f"<var> {name} = {value} </var>")

    def _top_item(self, depth: int = 0) -> None:
        choices = ["var", "write", "writev", "out", "if", "loop", "class", "read", "session", "include", "forward", "redirect"]
        if depth == 0:
            choices += ["db_ps", "function"]
        kind = self.rng.choice(choices)
        getattr(self, "_item_" + kind)(depth)

    def _item_var(self, depth: int) -> None:
        self._var()

    def _item_write(self, depth: int) -> None:
        self.parts.append(f"<write> {self.words()} </write>")

    def _item_writev(self, depth: int) -> None:
        pool = self.numeric_vars + self.string_vars
        if not pool:
            self._var()
            pool = self.numeric_vars + self.string_vars
        self.parts.append(f"<writev> {self.rng.choice(pool)} </writev>")

    def _item_out(self, depth: int) -> None:
        self.parts.append("<out>")
        for _ in range(self.rng.randint(1, 3)):
            pool = self.numeric_vars + self.string_vars
            if pool and self.rng.random() < 0.5:
                self.parts.append(f"<writev> {self.rng.choice(pool)} </writev>")
            else:
                self.parts.append(f"<write> {self.words()} </write>")
        self.parts.append("</out>")

    def _condition(self) -> str:
        if self.numeric_vars and self.rng.random() < 0.6:
            return "(%s %s %d)" % (self.rng.choice(self.numeric_vars), self.rng.choice(["<", ">", "!=", "=="]), self.rng.randint(0, 99))
        return "(%d < %d)" % (self.rng.randint(0, 9), self.rng.randint(10, 99))

    def _item_if(self, depth: int) -> None:
        trailer = " then" if self.rng.random() < 0.5 else ""
        self.parts.append(f"<s> if {self._condition()}{trailer} </s>")
        for _ in range(self.rng.randint(0, 2)):
            if depth < 2:
                self._top_item(depth + 1)
        if self.rng.random() < 0.5:
            self.parts.append("<s> else </s>")
            for _ in range(self.rng.randint(0, 2)):
                if depth < 2:
                    self._top_item(depth + 1)
        self.parts.append("<s> endif </s>")

    def _item_loop(self, depth: int) -> None:
        index = self.fresh("i")
        start = self.rng.randint(0, 5)
        if self.rng.random() < 0.7:
            bound = str(self.rng.randint(5, 20))
        else:
            bound = f"({index} < {self.rng.randint(5, 20)})"
        self.parts.append(f"<s> loop from {index} = {start} to {bound} step {self.rng.randint(1, 3)} </s>")
        self.numeric_vars.append(index)
        for _ in range(self.rng.randint(0, 2)):
            if depth < 2:
                self._top_item(depth + 1)
        self.parts.append("<s> endloop </s>")

    def _item_class(self, depth: int) -> None:
        cls = self.rng.choice(["Date", "Point", "Widget"])
        obj = self.fresh("obj")
        if self.rng.random() < 0.5:
            self.parts.append(f"<class> {cls} {obj} </class>")
        else:
            self.parts.append(f"<class> {cls} {obj} <pname> size = {self.rng.randint(1, 9)} </pname></class>")

    def _item_read(self, depth: int) -> None:
        target = self.fresh("r")
        source, kind = self.rng.choice([("request", "parameter"), ("session", "attribute"), ("request", "attribute")])
        self.parts.append(f"<read> {target}\n<object>{source}</object>\n<type>{kind}</type>\n<name>t{self.rng.randint(1, 9)}</name>\n</read>")
        self.string_vars.append(target)

    def _item_session(self, depth: int) -> None:
        self.parts.append("<session>")
        for _ in range(self.rng.randint(1, 2)):
            value = self.rng.choice(self.string_vars) if self.string_vars and self.rng.random() < 0.4 else self.rng.choice(_WORDS)
            self.parts.append(f"<set> {self.fresh('attr')} = {value} </set>")
        self.parts.append("</session>")

    def _item_include(self, depth: int) -> None:
        self.parts.append(f"<include> {self.rng.choice(_WORDS)}.jsp </include>")

    def _item_forward(self, depth: int) -> None:
        if self.rng.random() < 0.5:
            self.parts.append(f"<forward> {self.rng.choice(_WORDS)}.jsp </forward>")
        else:
            self.parts.append(
                f"<forward> {self.rng.choice(_WORDS)}.jsp <pname> id = {self.rng.randint(1, 99)} </pname></forward>"
            )

    def _item_redirect(self, depth: int) -> None:
        self.parts.append(f"<redirect> /{self.rng.choice(_WORDS)} </redirect>")

    def _item_db_ps(self, depth: int) -> None:
        conn = self.fresh("conn")
        pieces = [
            f"<driver>org.db.Driver</driver>",
            f"<url>jdbc:db://host/{self.rng.choice(_WORDS)}</url>",
            f"<uid>user{self.rng.randint(1, 9)}</uid>",
            f"<pwd>pw{self.rng.randint(1, 999)}</pwd>",
            f"<conn_name> {conn} </conn_name>",
        ]
        if self.rng.random() < 0.5:
            pieces.append(f"<excep_msg> {self.words()} </excep_msg>")
        self.rng.shuffle(pieces)
        self.parts.append("<dB>")
        self.parts.extend(pieces)
        self.parts.append("</dB>")
        self.db_open = True
        for _ in range(self.rng.randint(1, 2)):
            self._ps()

    def _ps(self) -> None:
        stmt = self.fresh("st")
        use_get = self.rng.random() >= 0.6
        self.parts.append("<ps>")
        local_var = None
        if self.rng.random() < 0.5:
            local_var = self.fresh("p")
            self.parts.append(f"<var> {local_var} = {self.rng.randint(0, 99)} </var>")
            self.numeric_vars.append(local_var)
        get_target = None
        if use_get:
            get_target = self.fresh("g")
            self.parts.append(f"<var> {get_target} = 0 </var>")
            self.numeric_vars.append(get_target)
        self.parts.append(f'<query> {stmt}="Update {self.rng.choice(_WORDS)} set x=? where id={self.rng.randint(1, 99)}" </query>')
        for index in range(1, self.rng.randint(1, 3) + 1):
            roll = self.rng.random()
            if roll < 0.4 and local_var is not None:
                arg, keyword = local_var, "int"
            elif roll < 0.7:
                arg, keyword = str(self.rng.randint(0, 9999)), self.rng.choice(["int", "integer"])
            else:
                arg, keyword = '"%s"' % self.rng.choice(_WORDS), "string"
            self.parts.append(f"<set> {keyword}({index},{arg}) </set>")
        if use_get:
            self.parts.append(f"<get> {get_target}=int({self.rng.randint(1, 3)}) </get>")
        else:
            result = self.fresh("res")
            self.parts.append(f"<result> {result} </result>")
            self.numeric_vars.append(result)
        self.parts.append("</ps>")

    def _item_function(self, depth: int) -> None:
        name = self.fresh("fn")
        param = self.fresh("arg")
        kind = self.rng.choice(["integer", "real"])
        self.parts.append("<function>")
        self.parts.append(f"<header> integer {name}({kind} {param}) </header>")
        self.parts.append(f"<writev> {param} </writev>")
        if self.rng.random() < 0.5:
            self.parts.append(f"<write> {self.words()} </write>")
        self.parts.append("</function>")
