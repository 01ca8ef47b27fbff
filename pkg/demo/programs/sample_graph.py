"""Minimum spanning tree demo built on a union-find structure."""


class DisjointSet:
    def __init__(self, size):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, i):
        if self.parent[i] == i:
            return i
        root = self.find(self.parent[i])
        self.parent[i] = root
        return root

    def union(self, a, b):
        root_a = self.find(a)
        root_b = self.find(b)
        if root_a == root_b:
            return False
        if self.rank[root_a] < self.rank[root_b]:
            root_a, root_b = root_b, root_a
        self.parent[root_b] = root_a
        if self.rank[root_a] == self.rank[root_b]:
            self.rank[root_a] = self.rank[root_a] + 1
        return True


class Graph:
    def __init__(self, vertices):
        self.vertices = vertices
        self.edges = []

    def add_edge(self, u, v, weight):
        self.edges.append((weight, u, v))

    def minimum_spanning_tree(self):
        forest = DisjointSet(self.vertices)
        total = 0
        picked = []
        for weight, u, v in sorted(self.edges):
            if forest.union(u, v):
                total = total + weight
                picked.append((u, v, weight))
        return total, picked


def main():
    graph = Graph(5)
    graph.add_edge(0, 1, 4)
    graph.add_edge(0, 2, 3)
    graph.add_edge(1, 2, 2)
    graph.add_edge(1, 3, 5)
    graph.add_edge(2, 3, 6)
    graph.add_edge(3, 4, 1)
    total, picked = graph.minimum_spanning_tree()
    print(total)
    print(picked)


if __name__ == "__main__":
    main()
