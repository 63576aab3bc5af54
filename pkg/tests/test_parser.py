from daqforge.diagnostics import Severity
from daqforge.model import (
    Action,
    ActionKind,
    ArchitectureModel,
    ColumnMeta,
    ColumnType,
    Connection,
    DataFormat,
    DataNode,
    DataRepresentation,
    Dimension,
    Direction,
    Level,
    Link,
    MessagePattern,
    NodeBehavior,
    Port,
    Processing,
    QualityRule,
    QualitySpec,
    ReceiveEvent,
    SourceBinding,
    SourceKind,
    TransferMode,
)
from daqforge.parser import parse_model


def errors(result):
    return [d.code for d in result.diagnostics
            if d.severity is Severity.ERROR]


def test_minimal_model():
    result = parse_model("architecture M level HLA { }")
    assert result.ok
    assert result.model == ArchitectureModel(name="M", level=Level.HLA)


# The users-source sample: one node, one verify action, one source,
# two quality rules.  The expected model is hand-built and frozen.
USERS_SAMPLE = """\
architecture checksite level LLA {
  node site {
    port in intake;
    behavior {
      event receive got via intake;
      action verify vet on source users {
        column username {
          uniqueness be_unique;
          completeness not_be_null;
        }
      };
      link got -> vet;
    }
  }
  source users {
    kind csvfile;
    path "users.csv";
    column username: string;
  }
}
"""


def expected_users_model() -> ArchitectureModel:
    rules = [
        QualityRule(column="username", dimension=Dimension.UNIQUENESS,
                    expectation="expect_column_values_to_be_unique"),
        QualityRule(column="username", dimension=Dimension.COMPLETENESS,
                    expectation="expect_column_values_to_not_be_null"),
    ]
    node = DataNode(
        name="site",
        representation=DataRepresentation(),
        ports=[Port(name="intake", direction=Direction.IN, owner="site")],
        behavior=NodeBehavior(
            elements=[
                ReceiveEvent(name="got", port="intake"),
                Action(name="vet", kind=ActionKind.VERIFY_DATA,
                       quality=QualitySpec(source="users", rules=rules)),
            ],
            links=[Link(src="got", dst="vet")],
        ),
    )
    source = SourceBinding(
        name="users", kind=SourceKind.CSVFILE,
        connection={"path": "users.csv"},
        columns=[ColumnMeta("username", ColumnType.STRING)],
    )
    return ArchitectureModel(name="checksite", level=Level.LLA,
                             nodes=[node], sources=[source])


def test_users_sample_builds_expected_model():
    result = parse_model(USERS_SAMPLE)
    assert result.diagnostics == []
    assert result.model == expected_users_model()


def test_duplicate_node_name_is_p010():
    result = parse_model(
        "architecture M level LLA { node A { port out p; } node A { } }")
    assert not result.ok
    assert errors(result) == ["P010"]
    assert "duplicate node name 'A'" in result.diagnostics[0].message


def test_duplicate_port_element_source_column_names():
    result = parse_model("""
architecture M level LLA {
  node A {
    port in p; port out p;
    behavior { action process x; action store x; }
  }
  source s { kind csvfile; path "x.csv"; column c: string; column c: date; }
  source s { kind csvfile; path "y.csv"; }
}
""")
    assert sorted(errors(result)) == ["P010"] * 4


def test_connection_defaults_and_explicit_options():
    result = parse_model("""
architecture M level HLA {
  node A { port out p; }
  node B { port in q; }
  connect A.p -> B.q;
  connect A.p -> B.q pattern request_response mode sync;
}
""")
    assert result.ok
    first, second = result.model.connections
    assert first == Connection(id="c1", from_node="A", from_port="p",
                               to_node="B", to_port="q",
                               pattern=MessagePattern.SEND_RECEIVE,
                               mode=TransferMode.ASYNC)
    assert second.id == "c2"
    assert second.pattern is MessagePattern.REQUEST_RESPONSE
    assert second.mode is TransferMode.SYNC


def test_unknown_vocabulary_words_are_p006():
    bad = [
        "architecture M level MID { }",
        "architecture M level HLA { node A { represent { format tape; } } }",
        "architecture M level HLA { node A { represent { storage nosql hdf; } } }",
        "architecture M level LLA { node A { behavior { action blend x; } } }",
        "architecture M level LLA { node A { behavior { action process.shred x; } } }",
        "architecture M level LLA { node A { behavior { action generation.fast x; } } }",
    ]
    for text in bad:
        result = parse_model(text)
        assert "P006" in errors(result), text


def test_unknown_expectation_is_p007():
    result = parse_model("""
architecture M level LLA {
  node A { behavior { action verify v on source s { column c { uniqueness be_mysterious; } }; } }
  source s { kind csvfile; path "x.csv"; column c: string; }
}
""")
    assert errors(result) == ["P007"]


def test_omitted_expectation_defaults_to_first_table_row():
    result = parse_model("""
architecture M level LLA {
  node A { behavior { action verify v on source s { column c { uniqueness; completeness; } }; } }
  source s { kind csvfile; path "x.csv"; column c: string; }
}
""")
    assert result.ok
    action = result.model.nodes[0].behavior.elements[0]
    names = [r.expectation for r in action.quality.rules]
    assert names == ["expect_column_values_to_be_unique",
                     "expect_column_values_to_not_be_null"]


def test_rule_params_parse_scalars_and_lists():
    result = parse_model("""
architecture M level LLA {
  node A { behavior { action verify v on source s {
    column c { accuracy be_in_set value_set=["a", 1, 2.5, true, -3]; }
  }; } }
  source s { kind csvfile; path "x.csv"; column c: string; }
}
""")
    assert result.ok
    rule = result.model.nodes[0].behavior.elements[0].quality.rules[0]
    assert rule.params == {"value_set": ["a", 1, 2.5, True, -3]}


def test_on_source_clause_restricted_to_verify():
    result = parse_model("""
architecture M level LLA {
  node A { behavior { action process p on source s { }; } }
  source s { kind csvfile; path "x.csv"; }
}
""")
    assert "P009" in errors(result)


def test_link_to_undeclared_element_is_p011():
    result = parse_model("""
architecture M level LLA {
  node A { behavior { action process x; link x -> ghost; } }
}
""")
    assert errors(result) == ["P011"]


def test_source_kind_requirements():
    missing = parse_model(
        'architecture M level HLA { source s { kind mysql; host "h"; } }')
    assert errors(missing).count("P012") == 2  # database and table
    extra = parse_model(
        'architecture M level HLA { source s { kind csvfile; path "p"; host "h"; } }')
    assert "P009" in errors(extra)
    no_kind = parse_model("architecture M level HLA { source s { } }")
    assert "P012" in errors(no_kind)


def test_storage_family_mismatch_is_rejected():
    result = parse_model(
        "architecture M level HLA { node A { represent { storage newsql graph; } } }")
    assert "P006" in errors(result)
    assert not result.ok


def test_syntax_error_reports_expected_hint_and_recovers():
    result = parse_model("""
architecture M level HLA {
  node A { port out; }
  node B { port in q; }
}
""")
    assert "P005" in errors(result)
    msg = next(d.message for d in result.diagnostics if d.code == "P005")
    assert "expected" in msg


def test_multiple_errors_reported_in_one_run():
    result = parse_model("""
architecture M level HLA {
  node A { port sideways p; }
  node A { }
  source s { }
}
""")
    codes = errors(result)
    assert "P005" in codes and "P010" in codes and "P012" in codes


def test_every_diagnostic_carries_a_span():
    result = parse_model(
        "architecture M level LLA { node A { port in p; } node A { } }")
    assert all(d.span is not None for d in result.diagnostics)


def test_declaration_order_is_preserved():
    result = parse_model("""
architecture M level HLA {
  source z { kind csvfile; path "z.csv"; }
  node B { }
  node A { }
  source a { kind csvfile; path "a.csv"; }
}
""")
    assert [n.name for n in result.model.nodes] == ["B", "A"]
    assert [s.name for s in result.model.sources] == ["z", "a"]
