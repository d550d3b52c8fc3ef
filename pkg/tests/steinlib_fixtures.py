"""Small STP documents used by the parser tests."""

MINIMAL = """\
33D32945 STP File, STP Format Version 1.0

SECTION Graph
Nodes 2
Edges 1
E 1 2 7
END

SECTION Terminals
Terminals 1
T 2
END

EOF
"""

TRIANGLE = """\
33D32945 STP File, STP Format Version 1.0

SECTION Comment
Name "triangle"
END

SECTION Graph
Nodes 3
Edges 3
E 1 2 1
E 2 3 2
E 1 3 4
END

SECTION Terminals
Terminals 2
T 1
T 2
END

EOF
"""

WITH_ROOT = """\
33D32945 STP File, STP Format Version 1.0

SECTION Graph
Nodes 5
Arcs 5
A 5 1 1
A 1 2 1
A 2 3 1
A 3 4 1
A 5 4 9
END

SECTION Terminals
Terminals 2
Root 5
T 2
T 4
END

EOF
"""

WITH_COORDS = """\
33D32945 STP File, STP Format Version 1.0

SECTION Graph
Nodes 4
Edges 3
E 1 2 5
E 2 3 4
E 2 4 6
END

SECTION Terminals
Terminals 3
T 1
T 2
T 3
END

SECTION Coordinates
DD 1 10 20
DD 2 15 20
DD 3 19 20
DD 4 12 25
END

EOF
"""
