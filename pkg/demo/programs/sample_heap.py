"""A small binary min-heap with a scripted driver."""


class MinHeap:
    def __init__(self):
        self.heap = []

    def push(self, value):
        self.heap.append(value)
        self._sift_up(len(self.heap) - 1)

    def _sift_up(self, index):
        while index > 0:
            parent = (index - 1) // 2
            if self.heap[index] < self.heap[parent]:
                self.heap[index], self.heap[parent] = self.heap[parent], self.heap[index]
                index = parent
            else:
                break

    def get_min(self):
        if not self.heap:
            return None
        return self.heap[0]

    def pop_min(self):
        if not self.heap:
            return None
        top = self.heap[0]
        last = self.heap.pop()
        if self.heap:
            self.heap[0] = last
            self._sift_down(0)
        return top

    def _sift_down(self, index):
        size = len(self.heap)
        while True:
            left = 2 * index + 1
            right = 2 * index + 2
            smallest = index
            if left < size and self.heap[left] < self.heap[smallest]:
                smallest = left
            if right < size and self.heap[right] < self.heap[smallest]:
                smallest = right
            if smallest == index:
                break
            self.heap[index], self.heap[smallest] = self.heap[smallest], self.heap[index]
            index = smallest


def main():
    heap = MinHeap()
    for value in [9, 4, 7, 1, 8, 2]:
        heap.push(value)
    print(heap.get_min())
    drained = []
    while heap.heap:
        drained.append(heap.pop_min())
    print(drained)
    print(heap.get_min())


if __name__ == "__main__":
    main()
